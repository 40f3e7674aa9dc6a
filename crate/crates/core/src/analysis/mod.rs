//! Width extraction from traces and the classical time-difference bound.

mod fit;
mod inequality;

pub use fit::{fit_gaussian, fit_gaussian_trace, FitOptions, GaussianFit, MIN_POINTS_ABOVE_HALF};
pub use inequality::{
    cancellation_persistence_bound, check_violation, franson_bound, separable_pulse_variance,
    VarianceReport, DEFAULT_VIOLATION_TOLERANCE,
};
