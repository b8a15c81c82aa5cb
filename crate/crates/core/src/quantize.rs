//! Floor quantization onto levels spaced by `2^-M`.

use crate::error::{Error, Result};
use crate::grid::{exp2i, DyadicGrid};
use crate::signal::UniformSignal;

/// Largest supported level exponent; levels must fit an `i64` comfortably.
pub const MAX_LEVEL_BITS: u32 = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantizationConfig {
    m: u32,
}

impl QuantizationConfig {
    pub fn new(m: u32) -> Result<Self> {
        if m > MAX_LEVEL_BITS {
            return Err(Error::domain(format!(
                "level exponent M={m} exceeds the supported maximum {MAX_LEVEL_BITS}"
            )));
        }
        Ok(Self { m })
    }

    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Number of levels, `2^M`.
    pub fn levels(&self) -> i64 {
        1i64 << self.m
    }

    /// Level spacing `2^-M`.
    pub fn quantum(&self) -> f64 {
        exp2i(-(self.m as i32))
    }

    /// Level index of one amplitude in `[0, 1]`. `1.0` is clamped to the top
    /// level `2^M - 1` so every index fits an M-bit register.
    pub fn level_of(&self, x: f64) -> Option<i64> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        // Scaling by 2^M is exact, so the floor sees the true product.
        let l = (x * self.levels() as f64).floor() as i64;
        Some(l.min(self.levels() - 1))
    }

    pub fn amplitude(&self, level: i64) -> f64 {
        level as f64 * self.quantum()
    }
}

/// Level indices `floor(2^M f_{j,k})` on the dyadic grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedSignal {
    grid: DyadicGrid,
    config: QuantizationConfig,
    levels: Vec<i64>,
}

impl QuantizedSignal {
    /// Wraps level indices; each must lie in `0..2^M`.
    pub fn new(grid: DyadicGrid, config: QuantizationConfig, levels: Vec<i64>) -> Result<Self> {
        if levels.len() != grid.len() {
            return Err(Error::domain(format!(
                "expected {} levels for j={}, got {}",
                grid.len(),
                grid.scale(),
                levels.len()
            )));
        }
        if let Some((k, l)) = levels
            .iter()
            .enumerate()
            .find(|(_, &l)| !(0..config.levels()).contains(&l))
        {
            return Err(Error::domain(format!(
                "level {l} at k={k} outside 0..{}",
                config.levels()
            )));
        }
        Ok(Self {
            grid,
            config,
            levels,
        })
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn config(&self) -> QuantizationConfig {
        self.config
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// Amplitudes `2^-M · level`, i.e. the samples of `f̃_j`.
    pub fn dequantize(&self) -> UniformSignal {
        let samples = self
            .levels
            .iter()
            .map(|&l| self.config.amplitude(l))
            .collect();
        UniformSignal::new(self.grid, samples).expect("dequantized levels are finite")
    }
}

/// Maps each sample to the nearest level below it.
pub fn quantize(s: &UniformSignal, cfg: QuantizationConfig) -> Result<QuantizedSignal> {
    let levels = s
        .samples()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            cfg.level_of(value)
                .ok_or(Error::OutOfRange { index, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedSignal {
        grid: s.grid(),
        config: cfg,
        levels,
    })
}
