use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FrequencyGrid;
use crate::{Error, Result, FWHM_PER_RMS, SPEED_OF_LIGHT_NM_PER_FS};

/// Complex field samples on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    grid: FrequencyGrid,
    samples: Vec<Complex64>,
}

impl SpectralAmplitude {
    pub fn new(grid: FrequencyGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.count()
            )));
        }
        if let Some(k) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("sample {k} is not finite")));
        }
        Ok(Self { grid, samples })
    }

    /// Samples `f(ω)` at every grid point.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = grid.frequencies().map(f).collect();
        Self::new(grid, samples)
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.count()],
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Σ |E(ω)|² Δω.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    /// Multiplies every sample by `exp(i·phase(ω))`.
    pub fn with_phase(&self, phase: impl Fn(f64) -> f64) -> Self {
        let samples = self
            .grid
            .frequencies()
            .zip(&self.samples)
            .map(|(w, z)| z * Complex64::cis(phase(w)))
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }
}

/// Quadratic spectral phase `β(ω − ω0)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSpec {
    beta: f64,
    reference: f64,
}

impl DispersionSpec {
    pub fn new(beta: f64, reference: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta {beta} is not finite")));
        }
        if !(reference > 0.0 && reference.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reference frequency must be positive, got {reference}"
            )));
        }
        Ok(Self { beta, reference })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn phase(&self, omega: f64) -> f64 {
        let x = omega - self.reference;
        self.beta * x * x
    }
}

/// Rms field bandwidth σ (rad/fs) of a Gaussian whose field spectrum has
/// the given FWHM in wavelength.
///
/// Uses the small-bandwidth conversion Δω = 2πc Δλ / λ².
pub fn sigma_from_fwhm_wavelength(fwhm_nm: f64, center_wavelength_nm: f64) -> Result<f64> {
    if !(fwhm_nm > 0.0 && center_wavelength_nm > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength and bandwidth must be positive, got {fwhm_nm} nm at {center_wavelength_nm} nm"
        )));
    }
    if fwhm_nm >= center_wavelength_nm {
        return Err(Error::InvalidParameter(format!(
            "bandwidth {fwhm_nm} nm is not small compared to {center_wavelength_nm} nm"
        )));
    }
    let delta_omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm
        / (center_wavelength_nm * center_wavelength_nm);
    Ok(delta_omega / FWHM_PER_RMS)
}

/// Angular frequency (rad/fs) of light at the given vacuum wavelength.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_FS / wavelength_nm
}

/// Transform-limited Gaussian field `exp(−(ω−center)²/(2σ²))`.
pub fn gaussian_field_spectrum(
    grid: &FrequencyGrid,
    center: f64,
    sigma: f64,
) -> Result<SpectralAmplitude> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    grid.ensure_covers(center, 6.0 * sigma)?;
    let inv = 1.0 / (2.0 * sigma * sigma);
    SpectralAmplitude::from_fn(*grid, |w| {
        let x = w - center;
        Complex64::new((-x * x * inv).exp(), 0.0)
    })
}

pub fn apply_quadratic_dispersion(
    field: &SpectralAmplitude,
    disp: &DispersionSpec,
) -> SpectralAmplitude {
    if disp.beta() == 0.0 {
        return field.clone();
    }
    field.with_phase(|w| disp.phase(w))
}

/// Delays the field by `tau` fs, multiplying each sample by `exp(−iωτ)`.
pub fn apply_delay(field: &SpectralAmplitude, tau: f64) -> SpectralAmplitude {
    if tau == 0.0 {
        return field.clone();
    }
    field.with_phase(|w| -w * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{half_maximum_width, make_frequency_grid};

    const SIGMA: f64 = 0.1191;
    const OMEGA0: f64 = 2.334;

    fn grid() -> FrequencyGrid {
        make_frequency_grid(OMEGA0, SIGMA, 8.0, 1024).unwrap()
    }

    #[test]
    fn laser_bandwidth_conversion() {
        let sigma = sigma_from_fwhm_wavelength(97.0, 807.0).unwrap();
        assert!((sigma - 0.1191).abs() < 5e-4, "{sigma}");
        // transform-limited cross-correlation width ≈ 19.8 fs
        assert!((FWHM_PER_RMS / sigma - 19.8).abs() < 0.05);

        let sigma_s = sigma_from_fwhm_wavelength(0.02, 404.0).unwrap();
        assert!((sigma_s - 9.80e-5).abs() < 0.01e-5, "{sigma_s}");
    }

    #[test]
    fn bandwidth_conversion_is_linear() {
        let a = sigma_from_fwhm_wavelength(10.0, 800.0).unwrap();
        let b = sigma_from_fwhm_wavelength(20.0, 800.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn bandwidth_conversion_rejects_broad_or_negative() {
        assert!(sigma_from_fwhm_wavelength(900.0, 807.0).is_err());
        assert!(sigma_from_fwhm_wavelength(807.0, 807.0).is_err());
        assert!(sigma_from_fwhm_wavelength(-1.0, 807.0).is_err());
        assert!(sigma_from_fwhm_wavelength(1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_peak_and_sigma_point() {
        let g = grid();
        let field = gaussian_field_spectrum(&g, OMEGA0, SIGMA).unwrap();
        let c = g.center_index();
        assert_eq!(field.samples()[c], Complex64::new(1.0, 0.0));
        assert!(field.samples().iter().all(|z| z.im == 0.0 && z.re > 0.0));

        let at_sigma = gaussian_field_spectrum(&g, OMEGA0 - SIGMA, SIGMA)
            .unwrap()
            .samples()[c];
        assert!((at_sigma.re - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_fwhm_within_half_step() {
        let g = grid();
        let field = gaussian_field_spectrum(&g, OMEGA0, SIGMA).unwrap();
        let freqs: Vec<f64> = g.frequencies().collect();
        let width = half_maximum_width(&freqs, &field.magnitudes()).unwrap();
        assert!((width - FWHM_PER_RMS * SIGMA).abs() < 0.5 * g.spacing());
    }

    #[test]
    fn gaussian_rejects_narrow_grid() {
        let g = make_frequency_grid(OMEGA0, SIGMA, 8.0, 1024).unwrap();
        let err = gaussian_field_spectrum(&g, OMEGA0, 2.0 * SIGMA).unwrap_err();
        assert!(matches!(err, Error::Coverage { .. }));
    }

    #[test]
    fn dispersion_identity_and_phase() {
        let g = grid();
        let field = gaussian_field_spectrum(&g, OMEGA0, SIGMA).unwrap();
        let none = DispersionSpec::new(0.0, OMEGA0).unwrap();
        assert_eq!(apply_quadratic_dispersion(&field, &none), field);

        let beta = 850.0;
        let disp = DispersionSpec::new(beta, OMEGA0 - SIGMA).unwrap();
        let out = apply_quadratic_dispersion(&field, &disp);
        let c = g.center_index();
        let expected = Complex64::cis(beta * SIGMA * SIGMA);
        assert!((out.samples()[c] - expected).norm() < 1e-12);
    }

    #[test]
    fn dispersion_and_delay_preserve_energy() {
        let g = grid();
        let field = gaussian_field_spectrum(&g, OMEGA0, SIGMA).unwrap();
        let disp = DispersionSpec::new(-1234.5, OMEGA0).unwrap();
        let out = apply_delay(&apply_quadratic_dispersion(&field, &disp), 37.0);
        assert!((out.energy() - field.energy()).abs() <= 1e-14 * field.energy());
    }

    #[test]
    fn delays_compose() {
        let g = grid();
        let field = gaussian_field_spectrum(&g, OMEGA0, SIGMA).unwrap();
        assert_eq!(apply_delay(&field, 0.0), field);
        let twice = apply_delay(&apply_delay(&field, 12.5), -3.25);
        let once = apply_delay(&field, 9.25);
        for (a, b) in twice.samples().iter().zip(once.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dispersion_spec_validation() {
        assert!(DispersionSpec::new(f64::NAN, 2.0).is_err());
        assert!(DispersionSpec::new(1.0, 0.0).is_err());
        assert!(DispersionSpec::new(-1.0, 2.0).is_ok());
    }

    #[test]
    fn amplitude_rejects_bad_samples() {
        let g = make_frequency_grid(1.0, 0.1, 8.0, 16).unwrap();
        assert!(SpectralAmplitude::new(g, vec![Complex64::new(0.0, 0.0); 15]).is_err());
        let mut v = vec![Complex64::new(1.0, 0.0); 16];
        v[3].im = f64::INFINITY;
        assert!(SpectralAmplitude::new(g, v).is_err());
    }
}
