//! Frequency grids, Gaussian spectra, spectral phases, Sellmeier dispersion
//! and the time-domain view.

mod field;
mod grid;
mod sellmeier;
mod temporal;

pub use field::{
    angular_frequency, apply_delay, apply_quadratic_dispersion, gaussian_field_spectrum,
    sigma_from_fwhm_wavelength, DispersionSpec, SpectralAmplitude,
};
pub use grid::{
    make_frequency_grid, FrequencyGrid, DEFAULT_COVERAGE, DEFAULT_GRID_COUNT, MIN_COVERAGE,
    MIN_GRID_COUNT,
};
pub use sellmeier::{
    bk7_beta, SellmeierCoefficients, SellmeierMedium, DEFAULT_DIFFERENCE_STEP,
};
pub use temporal::{time_domain_intensity, TemporalIntensity};

/// Full width at half maximum of sampled data around its global peak, with
/// linear interpolation of both crossings. `None` when the peak is not
/// positive or a crossing falls outside the samples.
pub fn half_maximum_width(x: &[f64], y: &[f64]) -> Option<f64> {
    let (peak, max) = y
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
    if !(max > 0.0) {
        return None;
    }
    let half = 0.5 * max;
    let crossing = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let left = (0..peak).rev().find(|&k| y[k] < half).map(|k| crossing(k, k + 1))?;
    let right = (peak + 1..y.len()).find(|&k| y[k] < half).map(|k| crossing(k - 1, k))?;
    Some(right - left)
}
