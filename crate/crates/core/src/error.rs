use thiserror::Error;

use crate::analysis::GaussianFit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "grid [{lower:.6}, {upper:.6}] rad/fs does not cover the required band [{required_lower:.6}, {required_upper:.6}] rad/fs"
    )]
    Coverage {
        lower: f64,
        upper: f64,
        required_lower: f64,
        required_upper: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("outside model domain: {0}")]
    Domain(String),

    #[error("insufficient sampling: {above_half} points above half maximum, at least {required} needed")]
    InsufficientSampling { above_half: usize, required: usize },

    #[error("Gaussian fit did not converge after {iterations} iterations")]
    FitFailure {
        iterations: usize,
        /// Moment-based estimate the fit started from.
        estimate: Box<GaussianFit>,
    },

    #[error(
        "time window overflow: edge density is {edge_ratio:.3e} of peak (limit {limit:.0e})"
    )]
    WindowOverflow { edge_ratio: f64, limit: f64 },

    #[error("data file: {0}")]
    DataFile(String),
}
