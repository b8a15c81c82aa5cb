//! Uniformly sampled signals on the dyadic grid and their text file format.
//!
//! The file format is line oriented: a `j=<int>` header followed by one
//! amplitude per line, `2^j` lines in total. Amplitudes are written with 17
//! significant digits so that reading a file back yields bit-identical
//! samples.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;

/// Samples `f(k·2^-j)` for `k = 0..2^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal {
    grid: DyadicGrid,
    samples: Vec<f64>,
}

impl UniformSignal {
    /// Wraps raw samples. The length must be `2^j` and every sample finite.
    pub fn new(grid: DyadicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::domain(format!(
                "expected {} samples for j={}, got {}",
                grid.len(),
                grid.scale(),
                samples.len()
            )));
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Smallest and largest sample.
    pub fn min_max(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j={}", self.grid.scale())?;
        for v in &self.samples {
            writeln!(w, "{}", fmt_f64(*v))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let header = header?;
        let j: u32 = header
            .trim()
            .strip_prefix("j=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("expected `j=<int>`, found `{header}`")))?;
        let grid = DyadicGrid::new(j)?;
        let mut samples = Vec::with_capacity(grid.len());
        for (idx, line) in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("invalid amplitude `{t}`")))?;
            samples.push(v);
        }
        Self::new(grid, samples)
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Samples `f` on the dyadic grid of scale `j`.
pub fn sample_uniform<F>(f: F, j: u32) -> Result<UniformSignal>
where
    F: Fn(f64) -> f64,
{
    let grid = DyadicGrid::new(j)?;
    let mut samples = Vec::with_capacity(grid.len());
    for (k, t) in grid.points().enumerate() {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { index: k, value: v });
        }
        samples.push(v);
    }
    Ok(UniformSignal { grid, samples })
}
