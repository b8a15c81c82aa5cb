//! Piecewise-linear interpolation in the Faber–Schauder hat basis.
//!
//! The interpolant at scale `j` is `Σ_k f_{j,k} φ(2^j x - k)` with
//! `φ(x) = max(0, 1 - |x|)`. Because neighbouring hats overlap on a single
//! interval, evaluation reduces to affine interpolation between the two
//! bracketing nodes.

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::signal::UniformSignal;

/// The hat function `φ(x) = max(0, 1 - |x|)`.
pub fn hat(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

/// A continuous function, affine on each `[k·2^-j, (k+1)·2^-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    grid: DyadicGrid,
    nodes: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    /// Coefficients on the hat functions, i.e. the values at grid points.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Evaluates the interpolant at `x ∈ [0, 1 - 2^-j]`.
    ///
    /// At a grid point the node value is returned as stored.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let last = self.grid.last_point();
        if !(0.0..=last).contains(&x) {
            return Err(Error::domain(format!(
                "x={x} outside the interpolation domain [0, {last}]"
            )));
        }
        // x·2^j is exact: scaling by a power of two.
        let t = x * self.grid.len() as f64;
        let k = t.floor();
        let frac = t - k;
        let k = k as usize;
        if frac == 0.0 {
            return Ok(self.nodes[k]);
        }
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        Ok(a + frac * (b - a))
    }

    /// Direct evaluation of the hat-basis expansion. Slow; kept as a
    /// cross-check for [`PiecewiseLinear::eval`].
    pub fn eval_basis(&self, x: f64) -> f64 {
        let scale = self.grid.len() as f64;
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, &c)| c * hat(scale * x - k as f64))
            .sum()
    }
}

/// Builds the piecewise-linear interpolant through the samples.
pub fn interpolate(s: &UniformSignal) -> PiecewiseLinear {
    PiecewiseLinear {
        grid: s.grid(),
        nodes: s.samples().to_vec(),
    }
}
