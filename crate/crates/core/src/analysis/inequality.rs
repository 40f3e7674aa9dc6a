use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative margin below the bound required before a result counts as a
/// violation.
pub const DEFAULT_VIOLATION_TOLERANCE: f64 = 0.05;

/// Outcome of comparing a final time-difference variance with the bound
/// classical pulses must obey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub measured_variance: f64,
    pub initial_variance: f64,
    pub beta: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub violated: bool,
}

/// Smallest final variance classical pulses can reach:
/// ⟨Δτ²⟩ + (2β)²/⟨Δτ²⟩.
pub fn franson_bound(initial_variance: f64, beta: f64) -> Result<f64> {
    if !(initial_variance > 0.0 && initial_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial variance must be positive, got {initial_variance}"
        )));
    }
    Ok(initial_variance + 4.0 * beta * beta / initial_variance)
}

/// Flags `measured_variance < bound · (1 − tolerance)`.
pub fn check_violation(
    measured_variance: f64,
    initial_variance: f64,
    beta: f64,
    tolerance: f64,
) -> Result<VarianceReport> {
    let bound = franson_bound(initial_variance, beta)?;
    if !(measured_variance > 0.0 && measured_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "measured variance must be positive, got {measured_variance}"
        )));
    }
    if !(tolerance > 0.0 && tolerance <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in (0, 0.1], got {tolerance}"
        )));
    }
    Ok(VarianceReport {
        measured_variance,
        initial_variance,
        beta,
        bound,
        tolerance,
        violated: measured_variance < bound * (1.0 - tolerance),
    })
}

/// Largest β for which narrow-band detection (or a narrow pump) still
/// cancels dispersion: 1/(σ·σ_narrow).
pub fn cancellation_persistence_bound(sigma: f64, sigma_narrow: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma_narrow > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bandwidths must be positive, got σ = {sigma}, σ_narrow = {sigma_narrow}"
        )));
    }
    Ok(1.0 / (sigma * sigma_narrow))
}

/// Time-difference variance of two transform-limited Gaussian pulses of
/// field bandwidth σ, chirped by β1 and β2 and timed by separate
/// detectors: each contributes (1 + 4β²σ⁴)/(2σ²).
pub fn separable_pulse_variance(sigma: f64, beta1: f64, beta2: f64) -> f64 {
    let s2 = sigma * sigma;
    let arm = |b: f64| (1.0 + 4.0 * b * b * s2 * s2) / (2.0 * s2);
    arm(beta1) + arm(beta2)
}
