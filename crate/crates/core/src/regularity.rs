//! Oscillations, moduli of continuity and Hölder exponent estimation.
//!
//! All scans run over grid points. For a piecewise-linear signal the extrema
//! on a ball whose endpoints are grid points are attained at nodes, so the
//! scans are exact for interpolants when centres and radii are dyadic.

use std::collections::VecDeque;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{exp2i, DyadicGrid};
use crate::interp::{interpolate, PiecewiseLinear};
use crate::signal::{fmt_f64, sample_uniform, UniformSignal};

/// Anything with values on a dyadic grid.
pub trait GridValues {
    fn grid(&self) -> DyadicGrid;
    fn values(&self) -> &[f64];
}

impl GridValues for UniformSignal {
    fn grid(&self) -> DyadicGrid {
        UniformSignal::grid(self)
    }
    fn values(&self) -> &[f64] {
        self.samples()
    }
}

impl GridValues for PiecewiseLinear {
    fn grid(&self) -> DyadicGrid {
        PiecewiseLinear::grid(self)
    }
    fn values(&self) -> &[f64] {
        self.nodes()
    }
}

fn check_radius(grid: DyadicGrid, r: f64) -> Result<()> {
    if r.is_nan() || r < grid.tick() {
        return Err(Error::Resolution {
            radius: r,
            spacing: grid.tick(),
        });
    }
    Ok(())
}

fn span(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// `Osc(f)(x0, r)`: max - min of the signal over `[x0 - r, x0 + r]`
/// intersected with the grid domain `[0, 1 - 2^-j]`.
pub fn oscillation<S: GridValues + ?Sized>(s: &S, x0: f64, r: f64) -> Result<f64> {
    let grid = s.grid();
    check_radius(grid, r)?;
    let n = grid.len() as f64;
    let lo = ((x0 - r) * n).ceil().max(0.0);
    let hi = ((x0 + r) * n).floor().min(n - 1.0);
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::domain(format!(
            "ball B({x0}, {r}) does not meet the grid domain"
        )));
    }
    Ok(span(&s.values()[lo as usize..=hi as usize]))
}

/// Oscillations over the balls `B((2m+1) r, r)` that tile `[0, 1)`.
fn tiling_oscillations<S: GridValues + ?Sized>(s: &S, r: f64) -> Result<Vec<f64>> {
    check_radius(s.grid(), r)?;
    let mut out = Vec::new();
    let mut centre = r;
    while centre - r < 1.0 {
        out.push(oscillation(s, centre, r)?);
        centre += 2.0 * r;
    }
    Ok(out)
}

/// Mean of `Osc(f)(x0, r)` over the tiling balls of radius `r`.
pub fn mean_oscillation<S: GridValues + ?Sized>(s: &S, r: f64) -> Result<f64> {
    let v = tiling_oscillations(s, r)?;
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

/// Largest `Osc(f)(x0, r)` over the tiling balls of radius `r`.
pub fn max_oscillation<S: GridValues + ?Sized>(s: &S, r: f64) -> Result<f64> {
    Ok(tiling_oscillations(s, r)?.into_iter().fold(0.0, f64::max))
}

/// `ω_f(r)`: the largest `|f(x+h) - f(x)|` over grid pairs with `|h| ≤ r`.
///
/// Equivalent to the largest max - min over windows of `⌊r 2^j⌋ + 1`
/// consecutive samples; computed with monotone deques in linear time.
pub fn uniform_modulus<S: GridValues + ?Sized>(s: &S, r: f64) -> Result<f64> {
    let grid = s.grid();
    check_radius(grid, r)?;
    let v = s.values();
    let width = ((r * grid.len() as f64).floor() as usize + 1).min(v.len());
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for k in 0..v.len() {
        while maxq.back().is_some_and(|&b| v[b] <= v[k]) {
            maxq.pop_back();
        }
        maxq.push_back(k);
        while minq.back().is_some_and(|&b| v[b] >= v[k]) {
            minq.pop_back();
        }
        minq.push_back(k);
        if k + 1 >= width {
            let start = k + 1 - width;
            while maxq.front().is_some_and(|&f| f < start) {
                maxq.pop_front();
            }
            while minq.front().is_some_and(|&f| f < start) {
                minq.pop_front();
            }
            best = best.max(v[maxq[0]] - v[minq[0]]);
        }
    }
    Ok(best)
}

/// Where an oscillation curve is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Centre {
    At(f64),
    /// Mean over the tiling balls.
    Mean,
    /// Maximum over the tiling balls.
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationCurve {
    pub centre: Centre,
    /// Decreasing dyadic radii `2^-i`.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Oscillation at radii `2^-i`, `i = i_min..=i_max`.
pub fn oscillation_curve<S: GridValues + ?Sized>(
    s: &S,
    centre: Centre,
    i_min: u32,
    i_max: u32,
) -> Result<OscillationCurve> {
    let radii: Vec<f64> = (i_min..=i_max).map(|i| exp2i(-(i as i32))).collect();
    let values = radii
        .iter()
        .map(|&r| match centre {
            Centre::At(x0) => oscillation(s, x0, r),
            Centre::Mean => mean_oscillation(s, r),
            Centre::Max => max_oscillation(s, r),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OscillationCurve {
        centre,
        radii,
        values,
    })
}

/// Per-scale statistic regressed against the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleStatistic {
    /// Mean oscillation over the tiling balls.
    #[default]
    MeanOscillation,
    /// The uniform modulus `ω_f(r)`.
    UniformModulus,
}

impl ScaleStatistic {
    fn eval<S: GridValues + ?Sized>(self, s: &S, r: f64) -> Result<f64> {
        match self {
            ScaleStatistic::MeanOscillation => mean_oscillation(s, r),
            ScaleStatistic::UniformModulus => uniform_modulus(s, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    pub alpha_hat: f64,
    /// Smallest `C` with `stat(r) ≤ C r^alpha_hat` on the fitted scales.
    pub c_upper: f64,
    /// Largest `c` with `stat(r) ≥ c r^alpha_hat` on the fitted scales.
    pub c_lower: f64,
    pub fit_range: (u32, u32),
    /// RMS of the log2 residuals.
    pub residual: f64,
    pub statistic: ScaleStatistic,
}

/// Fit range used when none is given: drops the two coarsest scales and
/// keeps at least eight grid points per ball.
pub fn default_fit_range(j: u32) -> (u32, u32) {
    (2, j.saturating_sub(3))
}

/// Hölder exponent from a least-squares fit of `log2 stat(2^-i)` against
/// `-i` over `i_min..=i_max`, using the default statistic.
pub fn estimate_holder_exponent<S: GridValues + ?Sized>(
    s: &S,
    i_min: u32,
    i_max: u32,
) -> Result<HolderEstimate> {
    estimate_holder_exponent_with(s, i_min, i_max, ScaleStatistic::default())
}

pub fn estimate_holder_exponent_with<S: GridValues + ?Sized>(
    s: &S,
    i_min: u32,
    i_max: u32,
    statistic: ScaleStatistic,
) -> Result<HolderEstimate> {
    let j = s.grid().scale();
    if i_min >= i_max {
        return Err(Error::domain(format!("empty fit range {i_min}..={i_max}")));
    }
    if i_max + 2 > j {
        return Err(Error::domain(format!(
            "scale 2^-{i_max} keeps fewer than 4 grid points per ball at j={j}"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut stats = Vec::new();
    for i in i_min..=i_max {
        let r = exp2i(-(i as i32));
        let v = statistic.eval(s, r)?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::Degenerate(format!("zero oscillation at radius 2^-{i}")));
        }
        xs.push(i as f64);
        ys.push(v.log2());
        stats.push((r, v));
    }
    let (intercept, slope) = least_squares(&xs, &ys);
    let alpha_hat = -slope;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    let ratios = stats.iter().map(|&(r, v)| v / r.powf(alpha_hat));
    let (c_lower, c_upper) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), q| (lo.min(q), hi.max(q)));
    Ok(HolderEstimate {
        alpha_hat,
        c_upper,
        c_lower,
        fit_range: (i_min, i_max),
        residual,
        statistic,
    })
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Finite-scale check of the two strong-modulus inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongModulusReport {
    pub j_max: u32,
    /// `sup_J Σ_{i≤J} 2^i θ(2^-i) / (2^J θ(2^-J))` over `J ≤ j_max`.
    pub ratio_sum1: f64,
    /// `sup_J Σ_{i≥J} θ(2^-i) / θ(2^-J)` over `J ≤ j_max`.
    pub ratio_sum2: f64,
    /// Per-`J` values of the first ratio.
    pub sum1_ratios: Vec<f64>,
    /// Per-`J` values of the second ratio.
    pub sum2_ratios: Vec<f64>,
    /// Whether the tail beyond the summed terms was extrapolated
    /// geometrically (false when the last terms did not decay).
    pub tail_extrapolated: bool,
}

impl StrongModulusReport {
    pub fn passes(&self, c: f64) -> bool {
        self.ratio_sum1 <= c && self.ratio_sum2 <= c
    }
}

/// Terms summed past `j_max` before the geometric tail estimate.
pub const STRONG_MODULUS_EXTRA_TERMS: u32 = 64;

/// Evaluates the strong-modulus ratios of `theta` on dyadic points.
///
/// The tail sum runs to `i = j_max + 64`; the remainder is estimated as
/// `θ_T q / (1 - q)` with `q = θ_T / θ_{T-1}` when `q < 1`.
pub fn check_strong_modulus<F>(theta: F, j_max: u32) -> Result<StrongModulusReport>
where
    F: Fn(f64) -> f64,
{
    let last = j_max + STRONG_MODULUS_EXTRA_TERMS;
    let values: Vec<f64> = (0..=last).map(|i| theta(exp2i(-(i as i32)))).collect();
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::domain(format!("θ(2^-{i}) = {v} is not positive")));
    }

    let sum1_ratios: Vec<f64> = (0..=j_max as usize)
        .map(|jj| {
            let s: f64 = (0..=jj)
                .map(|i| exp2i(i as i32 - jj as i32) * values[i])
                .sum();
            s / values[jj]
        })
        .collect();

    let t = last as usize;
    let q = values[t] / values[t - 1];
    let tail_extrapolated = q < 1.0;
    let tail = if tail_extrapolated { values[t] * q / (1.0 - q) } else { 0.0 };
    // Suffix sums from the smallest terms up.
    let mut suffix = vec![0.0; t + 2];
    suffix[t + 1] = tail;
    for i in (0..=t).rev() {
        suffix[i] = suffix[i + 1] + values[i];
    }
    let sum2_ratios: Vec<f64> = (0..=j_max as usize)
        .map(|jj| suffix[jj] / values[jj])
        .collect();

    let sup = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(StrongModulusReport {
        j_max,
        ratio_sum1: sup(&sum1_ratios),
        ratio_sum2: sup(&sum2_ratios),
        sum1_ratios,
        sum2_ratios,
        tail_extrapolated,
    })
}

/// `max |f - f_j|` over the grid of scale `j_ref` inside `[0, 1 - 2^-j]`,
/// where `f_j` is the scale-`j` piecewise-linear interpolant.
pub fn interpolation_error<F>(f: F, j: u32, j_ref: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if j_ref < j + 4 {
        return Err(Error::domain(format!(
            "reference scale {j_ref} must be at least j + 4 = {}",
            j + 4
        )));
    }
    let coarse = interpolate(&sample_uniform(&f, j)?);
    let fine = sample_uniform(&f, j_ref)?;
    let last = coarse.grid().last_point();
    let mut worst = 0.0f64;
    for (x, &v) in fine.grid().points().zip(fine.samples()) {
        if x > last {
            break;
        }
        worst = worst.max((v - coarse.eval(x)?).abs());
    }
    Ok(worst)
}

/// `max_k |a_k - b_k|` for two signals on the same grid.
pub fn sup_distance(a: &UniformSignal, b: &UniformSignal) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::domain("signals live on different grids"));
    }
    Ok(a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// One row of the per-scale analysis report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRow {
    pub scale_i: u32,
    pub radius: f64,
    pub modulus: f64,
    pub osc_mean: f64,
    pub osc_max: f64,
}

pub fn scale_report<S: GridValues + ?Sized>(s: &S, i_min: u32, i_max: u32) -> Result<Vec<ScaleRow>> {
    (i_min..=i_max)
        .map(|i| {
            let r = exp2i(-(i as i32));
            Ok(ScaleRow {
                scale_i: i,
                radius: r,
                modulus: uniform_modulus(s, r)?,
                osc_mean: mean_oscillation(s, r)?,
                osc_max: max_oscillation(s, r)?,
            })
        })
        .collect()
}

/// CSV with header `scale_i,radius,modulus,osc_mean,osc_max`.
pub fn write_scale_csv<W: Write>(rows: &[ScaleRow], mut w: W) -> Result<()> {
    writeln!(w, "scale_i,radius,modulus,osc_mean,osc_max")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.scale_i,
            fmt_f64(r.radius),
            fmt_f64(r.modulus),
            fmt_f64(r.osc_mean),
            fmt_f64(r.osc_max)
        )?;
    }
    w.flush()?;
    Ok(())
}
