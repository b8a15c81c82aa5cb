use crate::error::{Error, Result};

/// Largest supported scale exponent. Keeps `2^j` well inside `usize` and
/// keeps every grid point exactly representable in an `f64`.
pub const MAX_SCALE: u32 = 40;

/// The dyadic clock grid `k·2^-j`, `k = 0..2^j`, on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicGrid {
    j: u32,
}

impl DyadicGrid {
    pub fn new(j: u32) -> Result<Self> {
        if j > MAX_SCALE {
            return Err(Error::domain(format!(
                "scale exponent j={j} exceeds the supported maximum {MAX_SCALE}"
            )));
        }
        Ok(Self { j })
    }

    /// Scale exponent `j`.
    pub fn scale(&self) -> u32 {
        self.j
    }

    /// Number of grid points, `2^j`.
    pub fn len(&self) -> usize {
        1usize << self.j
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Clock tick `t_b = 2^-j`.
    pub fn tick(&self) -> f64 {
        exp2i(-(self.j as i32))
    }

    /// The time of grid point `k`. Exact for every `k < 2^j`.
    pub fn point(&self, k: usize) -> f64 {
        k as f64 * self.tick()
    }

    /// Last grid point, `1 - 2^-j`.
    pub fn last_point(&self) -> f64 {
        self.point(self.len() - 1)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }
}

/// `2^e` for small integer exponents, computed exactly.
pub(crate) fn exp2i(e: i32) -> f64 {
    f64::from_bits(((1023 + e as i64) as u64) << 52)
}
