//! Level-crossing sampling on dyadic grids.
//!
//! The pipeline takes a signal on `[0, 1)`, samples it at the clock ticks
//! `k·2^-j`, snaps every sample to the level `2^-M·⌊2^M f⌋` below it and
//! keeps one sample per run of equal levels. The modules here cover each of
//! those steps, the test signals used to probe them (fractional Brownian
//! motion, the Weierstrass function, ramps), regularity estimators for
//! those signals and a Monte Carlo sweep harness.
//!
//! ```
//! use lcsamp_core::{count_samples, decimate, gen_ramp, quantize, QuantizationConfig};
//!
//! let ramp = gen_ramp(10).unwrap();
//! let levels = quantize(&ramp, QuantizationConfig::new(4).unwrap()).unwrap();
//! let train = decimate(&levels).unwrap();
//! assert_eq!(count_samples(&train), 16);
//! ```

pub mod error;
pub mod generators;
pub mod grid;
pub mod interp;
pub mod quantize;
pub mod regularity;
pub mod sampler;
pub mod seed;
pub mod signal;
pub mod sweep;

pub use error::{Error, Result};
pub use generators::{
    fbm_covariance, gen_constant, gen_fbm, gen_fbm_with, gen_ramp, gen_weierstrass,
    normalize_to_unit_range, truncation_depth, FbmMethod, FbmSpec, Normalized, WeierstrassSpec,
};
pub use grid::DyadicGrid;
pub use interp::{interpolate, PiecewiseLinear};
pub use quantize::{quantize, QuantizationConfig, QuantizedSignal};
pub use regularity::{
    check_strong_modulus, estimate_holder_exponent, estimate_holder_exponent_with,
    interpolation_error, oscillation, uniform_modulus, HolderEstimate, ScaleStatistic,
    StrongModulusReport,
};
pub use sampler::{
    aadc_sample, count_samples, decimate, decimate_with, reconstruct, worst_case_bound,
    EventSample, EventTrain, KeepPolicy,
};
pub use seed::child_seed;
pub use signal::{sample_uniform, UniformSignal};
pub use sweep::{
    detect_critical_h, emit_csv, run_pipeline, run_sweep, CriticalEntry, GeneratorKind,
    SweepConfig, SweepRow,
};
