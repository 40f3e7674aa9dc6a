use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{half_maximum_width, SpectralAmplitude};

/// |E(t)|² on the time grid conjugate to a spectrum's frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalIntensity {
    times: Vec<f64>,
    values: Vec<f64>,
    step: f64,
}

impl TemporalIntensity {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Σ |E(t)|² Δt.
    pub fn energy(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step
    }

    /// Time of the largest sample.
    pub fn peak_time(&self) -> f64 {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        self.times[k]
    }

    pub fn fwhm(&self) -> Option<f64> {
        half_maximum_width(&self.times, &self.values)
    }
}

/// Intensity of the inverse Fourier transform,
/// E(t) = (1/√2π) ∫ E(ω) e^{iωt} dω, sampled on the conjugate grid.
///
/// The normalisation makes Σ|E(t)|²Δt equal Σ|E(ω)|²Δω.
pub fn time_domain_intensity(field: &SpectralAmplitude) -> TemporalIntensity {
    let grid = field.grid();
    let n = grid.count();
    // (-1)^k re-centres the transform on the grid's middle sample
    let mut buffer: Vec<Complex64> = field
        .samples()
        .iter()
        .enumerate()
        .map(|(k, z)| if k % 2 == 0 { *z } else { -*z })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buffer);
    let scale = grid.spacing() / (2.0 * PI).sqrt();
    let values = buffer.iter().map(|z| (z * scale).norm_sqr()).collect();
    TemporalIntensity {
        times: grid.times(),
        values,
        step: grid.time_step(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{
        apply_delay, apply_quadratic_dispersion, gaussian_field_spectrum, make_frequency_grid,
        DispersionSpec,
    };

    const SIGMA: f64 = 0.1191;
    const OMEGA0: f64 = 2.334;

    fn field(count: usize) -> SpectralAmplitude {
        wide_field(8.0, count)
    }

    /// Wider coverage gives a finer time step for width measurements.
    fn wide_field(coverage: f64, count: usize) -> SpectralAmplitude {
        let grid = make_frequency_grid(OMEGA0, SIGMA, coverage, count).unwrap();
        gaussian_field_spectrum(&grid, OMEGA0, SIGMA).unwrap()
    }

    #[test]
    fn parseval() {
        let f = field(4096);
        let chirped = apply_quadratic_dispersion(&f, &DispersionSpec::new(850.0, OMEGA0).unwrap());
        for spectrum in [f, chirped] {
            let t = time_domain_intensity(&spectrum);
            let rel = (t.energy() - spectrum.energy()).abs() / spectrum.energy();
            assert!(rel < 1e-9, "{rel}");
        }
    }

    #[test]
    fn transform_limited_duration() {
        let t = time_domain_intensity(&wide_field(48.0, 8192));
        assert!(t.step() < 0.6);
        let expected = 2.0 * 2f64.ln().sqrt() / SIGMA;
        assert!((expected - 13.98).abs() < 0.01);
        let fwhm = t.fwhm().unwrap();
        assert!((fwhm - expected).abs() / expected < 1e-3, "{fwhm}");
        assert!(t.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn chirped_duration_matches_gdd_formula() {
        let beta = 850.0;
        let t = time_domain_intensity(&apply_quadratic_dispersion(
            &wide_field(48.0, 16384),
            &DispersionSpec::new(beta, OMEGA0).unwrap(),
        ));
        // chirped Gaussian with group-delay dispersion φ″ = 2β
        let tau0 = 2.0 * 2f64.ln().sqrt() / SIGMA;
        let gdd = 2.0 * beta;
        let expected = tau0 * (1.0 + (4.0 * 2f64.ln() * gdd / (tau0 * tau0)).powi(2)).sqrt();
        let fwhm = t.fwhm().unwrap();
        assert!((fwhm - expected).abs() / expected < 1e-3, "{fwhm} vs {expected}");
    }

    #[test]
    fn delay_shifts_intensity() {
        let f = wide_field(48.0, 8192);
        let base = time_domain_intensity(&f);
        let width = base.fwhm().unwrap();
        let on_grid = -40.0 * base.step();
        for tau in [37.3, -120.0, on_grid] {
            let moved = time_domain_intensity(&apply_delay(&f, tau));
            assert!((moved.peak_time() - base.peak_time() - tau).abs() <= moved.step());
            assert!((moved.fwhm().unwrap() / width - 1.0).abs() < 1e-3);
        }
        let moved = time_domain_intensity(&apply_delay(&f, on_grid));
        assert!((moved.fwhm().unwrap() - width).abs() < 1e-9);
    }
}
