//! Test signals with known regularity: fractional Brownian motion, the
//! Weierstrass function and monotone ramps.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::signal::{sample_uniform, UniformSignal};

/// Largest path (in grid points) the dense covariance factorization accepts.
pub const DENSE_MAX_POINTS: usize = 2048;

/// Relative size of negative circulant eigenvalues treated as round-off.
const EIGEN_TOLERANCE: f64 = 1e-10;

fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Hurst index {h} outside (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub j: u32,
    pub seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, j: u32, seed: u64) -> Result<Self> {
        check_hurst(hurst)?;
        DyadicGrid::new(j)?;
        Ok(Self { hurst, j, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FbmMethod {
    /// Circulant embedding, falling back to the dense factorization for
    /// paths up to [`DENSE_MAX_POINTS`] if the embedding is not
    /// non-negative definite.
    #[default]
    Circulant,
    /// Circulant embedding only; an indefinite embedding is an error.
    CirculantStrict,
    /// Cholesky factor of the full covariance matrix.
    Dense,
}

/// `E[B_H(x) B_H(y)] = ½(|x|^2H + |y|^2H - |x-y|^2H)`.
pub fn fbm_covariance(x: f64, y: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    let e = 2.0 * hurst;
    Ok(0.5 * (x.abs().powf(e) + y.abs().powf(e) - (x - y).abs().powf(e)))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let e = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// One fBm path `B_H(k·2^-j)`, `B_H(0) = 0`, using the default method.
pub fn gen_fbm(spec: &FbmSpec) -> Result<UniformSignal> {
    gen_fbm_with(spec, FbmMethod::Circulant)
}

pub fn gen_fbm_with(spec: &FbmSpec, method: FbmMethod) -> Result<UniformSignal> {
    check_hurst(spec.hurst)?;
    let grid = DyadicGrid::new(spec.j)?;
    let n = grid.len();
    if n == 1 {
        return UniformSignal::new(grid, vec![0.0]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let path = match method {
        FbmMethod::Dense => dense_path(grid, spec.hurst, &mut rng)?,
        FbmMethod::Circulant | FbmMethod::CirculantStrict => {
            match circulant_increments(n - 1, spec.hurst, &mut rng) {
                Ok(noise) => {
                    let scale = grid.tick().powf(spec.hurst);
                    cumulative(noise.into_iter().map(|g| g * scale))
                }
                Err(e) if method == FbmMethod::CirculantStrict || n > DENSE_MAX_POINTS => {
                    return Err(e)
                }
                Err(e) => {
                    log::warn!("{e}; using dense covariance factorization");
                    dense_path(grid, spec.hurst, &mut rng)?
                }
            }
        }
    };
    UniformSignal::new(grid, path)
}

fn cumulative(increments: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    std::iter::once(0.0)
        .chain(increments.map(|d| {
            acc += d;
            acc
        }))
        .collect()
}

/// `len` samples of unit-step fractional Gaussian noise by circulant
/// embedding of the autocovariance in a circle of size `2L`, `L ≥ len` a
/// power of two.
fn circulant_increments(len: usize, hurst: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let half = len.next_power_of_two();
    let size = 2 * half;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|m| {
            let lag = if m <= half { m } else { size - m };
            Complex::new(fgn_autocovariance(lag, hurst), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut row);

    let largest = row.iter().map(|c| c.re).fold(0.0, f64::max);
    let most_negative = row.iter().map(|c| c.re).fold(0.0, f64::min);
    if most_negative < -EIGEN_TOLERANCE * largest {
        return Err(Error::Synthesis(format!(
            "circulant embedding for H={hurst} has eigenvalue {most_negative:e}"
        )));
    }

    let norm = 1.0 / size as f64;
    let mut w: Vec<Complex<f64>> = row
        .iter()
        .map(|lambda| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex::new(a, b) * (lambda.re.max(0.0) * norm).sqrt()
        })
        .collect();
    fft.process(&mut w);
    Ok(w[..len].iter().map(|c| c.re).collect())
}

fn dense_path(grid: DyadicGrid, hurst: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let n = grid.len();
    if n > DENSE_MAX_POINTS {
        return Err(Error::Synthesis(format!(
            "dense factorization limited to {DENSE_MAX_POINTS} points, path has {n}"
        )));
    }
    let m = n - 1;
    let e = 2.0 * hurst;
    let cov = DMatrix::from_fn(m, m, |a, b| {
        let (x, y) = (grid.point(a + 1), grid.point(b + 1));
        0.5 * (x.powf(e) + y.powf(e) - (x - y).abs().powf(e))
    });
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::Synthesis("fBm covariance is not positive definite".into()))?;
    let z = nalgebra::DVector::from_fn(m, |_, _| StandardNormal.sample(rng));
    let path = chol.l() * z;
    Ok(std::iter::once(0.0).chain(path.iter().copied()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassSpec {
    pub hurst: f64,
    pub j: u32,
    pub tail_tolerance: f64,
}

impl WeierstrassSpec {
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;

    pub fn new(hurst: f64, j: u32, tail_tolerance: f64) -> Result<Self> {
        check_hurst(hurst)?;
        DyadicGrid::new(j)?;
        if !(tail_tolerance > 0.0 && tail_tolerance.is_finite()) {
            return Err(Error::domain(format!(
                "tail tolerance {tail_tolerance} must be positive"
            )));
        }
        Ok(Self {
            hurst,
            j,
            tail_tolerance,
        })
    }

    /// Number of series terms kept.
    pub fn depth(&self) -> usize {
        truncation_depth(self.hurst, self.tail_tolerance)
    }

    /// The truncated series as a function of `x`.
    pub fn function(&self) -> impl Fn(f64) -> f64 + Sync {
        let (h, depth) = (self.hurst, self.depth());
        move |x| weierstrass(h, depth, x)
    }
}

/// Smallest `J` with `2^(-J H) / (1 - 2^-H) ≤ tol`, the bound on the
/// discarded tail `Σ_{m ≥ J} 2^(-m H) cos(2^m x)`.
pub fn truncation_depth(hurst: f64, tol: f64) -> usize {
    let bound = |depth: usize| (-(depth as f64) * hurst).exp2() / (1.0 - (-hurst).exp2());
    let guess = ((1.0 / (tol * (1.0 - (-hurst).exp2()))).log2() / hurst).ceil();
    let mut depth = if guess.is_finite() { guess.max(0.0) as usize } else { 0 };
    while depth > 0 && bound(depth - 1) <= tol {
        depth -= 1;
    }
    while bound(depth) > tol {
        depth += 1;
    }
    depth
}

/// `Σ_{m < depth} 2^(-m H) cos(2^m x)`.
pub fn weierstrass(hurst: f64, depth: usize, x: f64) -> f64 {
    // Smallest terms first.
    (0..depth)
        .rev()
        .map(|m| (-(m as f64) * hurst).exp2() * ((m as f64).exp2() * x).cos())
        .sum()
}

pub fn gen_weierstrass(spec: &WeierstrassSpec) -> Result<UniformSignal> {
    check_hurst(spec.hurst)?;
    sample_uniform(spec.function(), spec.j)
}

/// `k·2^-j`: monotone, covering `[0, 1)`.
pub fn gen_ramp(j: u32) -> Result<UniformSignal> {
    sample_uniform(|t| t, j)
}

pub fn gen_constant(value: f64, j: u32) -> Result<UniformSignal> {
    sample_uniform(|_| value, j)
}

/// Result of mapping a signal affinely onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub signal: UniformSignal,
    /// Minimum of the input, mapped to 0.
    pub min: f64,
    /// Maximum of the input, mapped to 1.
    pub max: f64,
    /// Set when the input was constant and the output is all zeros.
    pub degenerate: bool,
}

/// `x ↦ (x - min) / (max - min)`. A constant signal maps to zeros and is
/// flagged as degenerate.
pub fn normalize_to_unit_range(s: &UniformSignal) -> Normalized {
    let (min, max) = s.min_max();
    let range = max - min;
    if range.is_nan() || range <= 0.0 || !range.is_finite() {
        log::warn!("normalizing a constant signal; returning zeros");
        let zeros = vec![0.0; s.samples().len()];
        return Normalized {
            signal: UniformSignal::new(s.grid(), zeros).expect("zeros are finite"),
            min,
            max,
            degenerate: true,
        };
    }
    let samples = s.samples().iter().map(|&x| (x - min) / range).collect();
    Normalized {
        signal: UniformSignal::new(s.grid(), samples).expect("affine image of finite samples"),
        min,
        max,
        degenerate: false,
    }
}
