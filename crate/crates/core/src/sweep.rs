//! Monte Carlo sweeps of the decimated sample count over Hurst index, clock
//! scale and level resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{
    gen_constant, gen_fbm, gen_ramp, gen_weierstrass, normalize_to_unit_range, FbmSpec,
    WeierstrassSpec,
};
use crate::quantize::{quantize, QuantizationConfig, QuantizedSignal};
use crate::sampler::{count_samples, decimate, worst_case_bound, EventTrain};
use crate::seed::child_seed;
use crate::signal::{fmt_f64, UniformSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Fbm,
    Weierstrass,
    Ramp,
    /// Constant 0.5; mainly a degenerate-input check.
    Constant,
}

impl GeneratorKind {
    pub fn is_random(self) -> bool {
        self == GeneratorKind::Fbm
    }

    /// One signal at scale `j`. `hurst` is ignored by ramps and constants,
    /// `seed` by everything but fBm.
    pub fn generate(self, hurst: f64, j: u32, seed: u64, tail_tolerance: f64) -> Result<UniformSignal> {
        match self {
            GeneratorKind::Fbm => gen_fbm(&FbmSpec::new(hurst, j, seed)?),
            GeneratorKind::Weierstrass => {
                gen_weierstrass(&WeierstrassSpec::new(hurst, j, tail_tolerance)?)
            }
            GeneratorKind::Ramp => gen_ramp(j),
            GeneratorKind::Constant => gen_constant(0.5, j),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Fbm => "fbm",
            GeneratorKind::Weierstrass => "weierstrass",
            GeneratorKind::Ramp => "ramp",
            GeneratorKind::Constant => "constant",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fbm" => Ok(GeneratorKind::Fbm),
            "weierstrass" => Ok(GeneratorKind::Weierstrass),
            "ramp" => Ok(GeneratorKind::Ramp),
            "constant" => Ok(GeneratorKind::Constant),
            other => Err(Error::domain(format!("unknown generator `{other}`"))),
        }
    }
}

/// Everything a single pipeline run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// The signal fed to the quantizer (normalized when requested).
    pub input: UniformSignal,
    pub quantized: QuantizedSignal,
    pub train: EventTrain,
    /// Range of the raw signal before normalization.
    pub raw_range: (f64, f64),
}

impl PipelineOutput {
    pub fn count(&self) -> usize {
        count_samples(&self.train)
    }
}

/// Uniform sampling has already happened; normalize, quantize and decimate.
pub fn run_pipeline(signal: &UniformSignal, m: u32, normalize: bool) -> Result<PipelineOutput> {
    let cfg = QuantizationConfig::new(m)?;
    let raw_range = signal.min_max();
    let input = if normalize {
        normalize_to_unit_range(signal).signal
    } else {
        signal.clone()
    };
    let quantized = quantize(&input, cfg)?;
    let train = decimate(&quantized)?;
    Ok(PipelineOutput {
        input,
        quantized,
        train,
        raw_range,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub generator: GeneratorKind,
    pub hurst_grid: Vec<f64>,
    pub j_list: Vec<u32>,
    pub m_list: Vec<u32>,
    pub realizations: usize,
    pub master_seed: u64,
    pub normalize: bool,
    pub worst_case_c: f64,
    pub tail_tolerance: f64,
    pub kappa: f64,
}

pub const DEFAULT_KAPPA: f64 = 0.5;
pub const DEFAULT_MASTER_SEED: u64 = 20_130_101;

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorKind::Fbm,
            hurst_grid: hurst_range(0.05, 0.95, 0.05),
            j_list: vec![10, 13],
            m_list: vec![4, 5],
            realizations: 1000,
            master_seed: DEFAULT_MASTER_SEED,
            normalize: true,
            worst_case_c: 1.0,
            tail_tolerance: WeierstrassSpec::DEFAULT_TAIL_TOLERANCE,
            kappa: DEFAULT_KAPPA,
        }
    }
}

/// `start, start + step, ..., ≤ stop`, rounded to 12 decimals so grid values
/// print cleanly.
pub fn hurst_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::domain("realizations must be at least 1"));
        }
        if self.hurst_grid.is_empty() || self.j_list.is_empty() || self.m_list.is_empty() {
            return Err(Error::domain("H grid, j list and M list must be non-empty"));
        }
        if let Some(h) = self.hurst_grid.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return Err(Error::domain(format!("H={h} outside (0, 1)")));
        }
        if self.worst_case_c.is_nan() || self.worst_case_c <= 0.0 {
            return Err(Error::domain("worst_case_C must be positive"));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::domain(format!("kappa={} outside (0, 1)", self.kappa)));
        }
        Ok(())
    }

    /// Realizations actually drawn: deterministic generators need one.
    pub fn effective_realizations(&self) -> usize {
        if self.generator.is_random() {
            self.realizations
        } else {
            1
        }
    }

    /// Parses `key = value` lines. `#` starts a comment. Unknown keys are
    /// errors. Keys not present keep their defaults.
    pub fn from_reader<R: BufRead>(r: R) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::config(lineno, format!("expected `key = value`, found `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::config(lineno, format!("invalid {what} `{value}`"));
            match key {
                "generator" => cfg.generator = value.parse().map_err(|_| bad("generator"))?,
                "H_grid" => cfg.hurst_grid = parse_hurst_grid(value).ok_or_else(|| bad("H grid"))?,
                "j_list" => cfg.j_list = parse_list(value).ok_or_else(|| bad("j list"))?,
                "M_list" => cfg.m_list = parse_list(value).ok_or_else(|| bad("M list"))?,
                "realizations" => cfg.realizations = value.parse().map_err(|_| bad("count"))?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
                "normalize" => cfg.normalize = value.parse().map_err(|_| bad("boolean"))?,
                "worst_case_C" => cfg.worst_case_c = value.parse().map_err(|_| bad("constant"))?,
                "tail_tolerance" => cfg.tail_tolerance = value.parse().map_err(|_| bad("tolerance"))?,
                "kappa" => cfg.kappa = value.parse().map_err(|_| bad("kappa"))?,
                other => return Err(Error::config(lineno, format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }
}

fn parse_list<T: FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().ok())
        .collect::<Option<Vec<T>>>()
        .filter(|v| !v.is_empty())
}

/// Either a comma list or `start:stop:step`.
pub fn parse_hurst_grid(s: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, c] => {
            let (start, stop, step): (f64, f64, f64) =
                (a.trim().parse().ok()?, b.trim().parse().ok()?, c.trim().parse().ok()?);
            (step > 0.0 && stop >= start).then(|| hurst_range(start, stop, step))
        }
        [_] => parse_list(s),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub hurst: f64,
    pub j: u32,
    pub m: u32,
    pub mean_n: f64,
    pub std_n: f64,
    pub n_worst: f64,
    pub log2_mean_n: f64,
}

/// Range of one realization before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    pub hurst: f64,
    pub j: u32,
    pub realization: usize,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Ordered by `(j, M, H)`.
    pub rows: Vec<SweepRow>,
    pub normalization: Vec<NormalizationRecord>,
}

/// Seed used for realization `index`. Deterministic generators ignore it.
pub fn realization_seed(cfg: &SweepConfig, index: usize) -> u64 {
    child_seed(cfg.master_seed, index as u64)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let reals = cfg.effective_realizations();
    let level_cfgs = cfg
        .m_list
        .iter()
        .map(|&m| QuantizationConfig::new(m))
        .collect::<Result<Vec<_>>>()?;

    // (j, M index, H index) -> counts per realization
    let mut cells: BTreeMap<(u32, usize, usize), Vec<usize>> = BTreeMap::new();
    let mut normalization = Vec::new();

    for &j in &cfg.j_list {
        for (hi, &hurst) in cfg.hurst_grid.iter().enumerate() {
            let results: Vec<(Vec<usize>, NormalizationRecord)> = (0..reals)
                .into_par_iter()
                .map(|r| {
                    let seed = realization_seed(cfg, r);
                    realization(cfg, &level_cfgs, hurst, j, seed)
                        .map(|(counts, (min, max))| {
                            let rec = NormalizationRecord {
                                hurst,
                                j,
                                realization: r,
                                seed,
                                min,
                                max,
                            };
                            (counts, rec)
                        })
                        .map_err(|e| Error::Realization {
                            hurst,
                            j,
                            seed,
                            source: Box::new(e),
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            for (counts, rec) in results {
                for (mi, c) in counts.into_iter().enumerate() {
                    cells.entry((j, mi, hi)).or_default().push(c);
                }
                normalization.push(rec);
            }
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    let mut keys: Vec<_> = cells.keys().copied().collect();
    keys.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(cfg.m_list[a.1].cmp(&cfg.m_list[b.1]))
            .then(cfg.hurst_grid[a.2].total_cmp(&cfg.hurst_grid[b.2]))
    });
    for key in keys {
        let (j, mi, hi) = key;
        let counts = &cells[&key];
        let (mean_n, std_n) = mean_std(counts);
        let hurst = cfg.hurst_grid[hi];
        let m = cfg.m_list[mi];
        rows.push(SweepRow {
            hurst,
            j,
            m,
            mean_n,
            std_n,
            n_worst: worst_case_bound(j, m, hurst, cfg.worst_case_c)?,
            log2_mean_n: mean_n.log2(),
        });
    }
    Ok(SweepOutput {
        rows,
        normalization,
    })
}

fn realization(
    cfg: &SweepConfig,
    level_cfgs: &[QuantizationConfig],
    hurst: f64,
    j: u32,
    seed: u64,
) -> Result<(Vec<usize>, (f64, f64))> {
    let raw = cfg.generator.generate(hurst, j, seed, cfg.tail_tolerance)?;
    let range = raw.min_max();
    let input = if cfg.normalize {
        normalize_to_unit_range(&raw).signal
    } else {
        raw
    };
    let counts = level_cfgs
        .iter()
        .map(|&lc| Ok(count_samples(&decimate(&quantize(&input, lc)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((counts, range))
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(counts: &[usize]) -> (f64, f64) {
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    if counts.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub const SWEEP_CSV_HEADER: &str = "H,j,M,mean_n,std_n,n_worst,log2_mean_n";

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.hurst),
            r.j,
            r.m,
            fmt_f64(r.mean_n),
            fmt_f64(r.std_n),
            fmt_f64(r.n_worst),
            fmt_f64(r.log2_mean_n)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the sweep table to `path`. Refuses empty input without touching
/// the filesystem.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain("no sweep rows to write"));
    }
    let mut buf = Vec::new();
    write_sweep_csv(rows, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_sweep_csv<R: BufRead>(r: R) -> Result<Vec<SweepRow>> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    if header?.trim() != SWEEP_CSV_HEADER {
        return Err(Error::parse(1, format!("expected header `{SWEEP_CSV_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::parse(idx + 1, format!("malformed row `{line}`"));
        if f.len() != 7 {
            return Err(bad());
        }
        let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let int = |s: &str| s.parse::<u32>().map_err(|_| bad());
        rows.push(SweepRow {
            hurst: real(f[0])?,
            j: int(f[1])?,
            m: int(f[2])?,
            mean_n: real(f[3])?,
            std_n: real(f[4])?,
            n_worst: real(f[5])?,
            log2_mean_n: real(f[6])?,
        });
    }
    Ok(rows)
}

/// Rule identifier written next to each detected critical value.
pub const CRITICAL_RULE: &str = "first_H_below_kappa_plateau";

/// Widest H spacing the detector accepts.
pub const MAX_H_SPACING: f64 = 0.05 + 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalEntry {
    pub j: u32,
    pub m: u32,
    /// `None` when no grid value satisfies the rule.
    pub h_c: Option<f64>,
    pub rule: &'static str,
    pub kappa: f64,
}

/// Smallest grid `H` with `mean_n < kappa · 2^j`, for rows sharing `(j, M)`.
pub fn detect_critical_h(rows: &[SweepRow], kappa: f64) -> Result<CriticalEntry> {
    let first = rows.first().ok_or_else(|| Error::domain("no rows"))?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::domain(format!("kappa={kappa} outside (0, 1)")));
    }
    if rows.iter().any(|r| r.j != first.j || r.m != first.m) {
        return Err(Error::domain("rows mix different (j, M) pairs"));
    }
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.hurst.total_cmp(&b.hurst));
    if let Some(w) = sorted.windows(2).find(|w| w[1].hurst - w[0].hurst > MAX_H_SPACING) {
        return Err(Error::domain(format!(
            "H grid gap {}..{} wider than 0.05",
            w[0].hurst, w[1].hurst
        )));
    }
    let plateau = 2f64.powi(first.j as i32);
    let h_c = sorted
        .iter()
        .find(|r| r.mean_n < kappa * plateau)
        .map(|r| r.hurst);
    Ok(CriticalEntry {
        j: first.j,
        m: first.m,
        h_c,
        rule: CRITICAL_RULE,
        kappa,
    })
}

/// Critical values for every `(j, M)` present, ordered by `(j, M)`.
pub fn detect_all(rows: &[SweepRow], kappa: f64) -> Result<Vec<CriticalEntry>> {
    let mut groups: BTreeMap<(u32, u32), Vec<SweepRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.j, r.m)).or_default().push(*r);
    }
    groups.values().map(|g| detect_critical_h(g, kappa)).collect()
}

pub fn write_critical_csv<W: Write>(entries: &[CriticalEntry], mut w: W) -> Result<()> {
    writeln!(w, "j,M,H_c,rule,kappa")?;
    for e in entries {
        let h = e.h_c.map_or_else(|| "NA".to_string(), fmt_f64);
        writeln!(w, "{},{},{},{},{}", e.j, e.m, h, e.rule, fmt_f64(e.kappa))?;
    }
    w.flush()?;
    Ok(())
}
