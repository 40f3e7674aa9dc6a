//! Classical signal chain: sum-frequency mixing of two pulses, narrow-band
//! detection of the second harmonic and delay scans of the detected signal.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::spectral::{
    apply_delay, apply_quadratic_dispersion, gaussian_field_spectrum, make_frequency_grid,
    DispersionSpec, FrequencyGrid, SpectralAmplitude, DEFAULT_COVERAGE, DEFAULT_GRID_COUNT,
};
use crate::{fwhm_from_rms, Error, Result};

/// Smallest number of delays a trace may hold.
pub const MIN_TRACE_POINTS: usize = 32;

/// Default number of delays in an automatically sampled scan.
pub const DEFAULT_DELAY_COUNT: usize = 201;

/// Default one-sided extent of an automatic scan, in expected FWHMs.
pub const DEFAULT_DELAY_SPAN_FWHM: f64 = 5.0;

/// Gaussian spectral response of the monochromator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonochromatorSpec {
    center: f64,
    sigma_s: f64,
}

impl MonochromatorSpec {
    pub fn new(center: f64, sigma_s: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "monochromator center must be positive, got {center}"
            )));
        }
        if !(sigma_s > 0.0 && sigma_s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "monochromator resolution must be positive, got {sigma_s}"
            )));
        }
        Ok(Self { center, sigma_s })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    /// S(ω) = exp(−(ω − center)²/(2σ_s²)).
    pub fn response(&self, omega: f64) -> f64 {
        let x = omega - self.center;
        (-x * x / (2.0 * self.sigma_s * self.sigma_s)).exp()
    }
}

/// Detected intensity versus delay, normalised to unit peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    delays: Vec<f64>,
    intensities: Vec<f64>,
}

impl CorrelationTrace {
    /// Builds a trace from raw non-negative intensities and rescales it so
    /// that the maximum is 1.
    pub fn normalized(delays: Vec<f64>, raw: Vec<f64>) -> Result<Self> {
        if delays.len() != raw.len() {
            return Err(Error::InvalidParameter(format!(
                "{} delays but {} intensities",
                delays.len(),
                raw.len()
            )));
        }
        if delays.len() < MIN_TRACE_POINTS {
            return Err(Error::InvalidParameter(format!(
                "a trace needs at least {MIN_TRACE_POINTS} delays, got {}",
                delays.len()
            )));
        }
        if delays.iter().any(|d| !d.is_finite()) || delays.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "delays must be finite and strictly increasing".into(),
            ));
        }
        if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "intensities must be finite and non-negative".into(),
            ));
        }
        let max = raw.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::InvalidParameter("trace is identically zero".into()));
        }
        let intensities = raw.into_iter().map(|v| v / max).collect();
        Ok(Self {
            delays,
            intensities,
        })
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }
}

fn check_pair(field1: &SpectralAmplitude, field2: &SpectralAmplitude) -> Result<()> {
    let (g1, g2) = (field1.grid(), field2.grid());
    if !g1.is_compatible(g2) {
        return Err(Error::GridMismatch(format!(
            "spacing {} / count {} versus spacing {} / count {}",
            g1.spacing(),
            g1.count(),
            g2.spacing(),
            g2.count()
        )));
    }
    Ok(())
}

/// Output grid of the mixing product: centred on the sum of the input
/// centres, same spacing, half-width √2 times the input half-width.
fn shg_output_grid(input: &FrequencyGrid, center: f64) -> Result<(FrequencyGrid, usize)> {
    let n = input.count();
    let half = ((n / 2) as f64 * std::f64::consts::SQRT_2).floor() as usize;
    let grid = FrequencyGrid::new(center, input.spacing(), 2 * half)?;
    // full linear convolution index n maps to the output centre
    Ok((grid, n - half))
}

/// E_SHG(ω) = ∫ E1(ω′) E2(ω − ω′) dω′ by zero-padded FFT convolution.
///
/// The inputs must share spacing and count; the output is centred on the
/// sum of their centres.
pub fn shg_spectrum(field1: &SpectralAmplitude, field2: &SpectralAmplitude) -> Result<SpectralAmplitude> {
    check_pair(field1, field2)?;
    let input = *field1.grid();
    let n = input.count();
    let (grid, first) = shg_output_grid(&input, field1.grid().center() + field2.grid().center())?;

    let padded = 2 * n;
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(padded);
    let inverse = planner.plan_fft_inverse(padded);
    let pad = |f: &SpectralAmplitude| {
        let mut v = f.samples().to_vec();
        v.resize(padded, Complex64::new(0.0, 0.0));
        v
    };
    let (mut a, mut b) = (pad(field1), pad(field2));
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse.process(&mut a);
    let scale = input.spacing() / padded as f64;
    let samples = a[first..first + grid.count()].iter().map(|z| z * scale).collect();
    SpectralAmplitude::new(grid, samples)
}

/// Same product as [`shg_spectrum`] by direct summation.
pub fn shg_spectrum_direct(
    field1: &SpectralAmplitude,
    field2: &SpectralAmplitude,
) -> Result<SpectralAmplitude> {
    check_pair(field1, field2)?;
    let input = *field1.grid();
    let n = input.count();
    let (grid, first) = shg_output_grid(&input, field1.grid().center() + field2.grid().center())?;
    let (a, b) = (field1.samples(), field2.samples());
    let samples = (first..first + grid.count())
        .map(|out| {
            let lo = out.saturating_sub(n - 1);
            let hi = out.min(n - 1);
            (lo..=hi).map(|k| a[k] * b[out - k]).sum::<Complex64>() * input.spacing()
        })
        .collect();
    SpectralAmplitude::new(grid, samples)
}

/// The single output sample of the mixing product at the sum of the input
/// centres.
pub fn shg_amplitude_at_center(
    field1: &SpectralAmplitude,
    field2: &SpectralAmplitude,
) -> Result<Complex64> {
    check_pair(field1, field2)?;
    let n = field1.grid().count();
    let (a, b) = (field1.samples(), field2.samples());
    Ok((1..n).map(|k| a[k] * b[n - k]).sum::<Complex64>() * field1.grid().spacing())
}

/// ∫ S(ω) |E_SHG(ω)|² dω by the trapezoidal rule.
///
/// The grid must either cover `center ± 6σ_s` or hold the whole SHG band,
/// i.e. carry negligible power at both edges.
pub fn monochromator_signal(shg: &SpectralAmplitude, mono: &MonochromatorSpec) -> Result<f64> {
    let grid = shg.grid();
    let power: Vec<f64> = shg.samples().iter().map(|z| z.norm_sqr()).collect();
    if grid.ensure_covers(mono.center(), 6.0 * mono.sigma_s()).is_err() {
        let max = power.iter().copied().fold(0.0, f64::max);
        let edge = power[0].max(power[power.len() - 1]);
        if edge > 1e-12 * max {
            grid.ensure_covers(mono.center(), 6.0 * mono.sigma_s())?;
        }
    }
    let last = power.len() - 1;
    let sum: f64 = grid
        .frequencies()
        .zip(&power)
        .enumerate()
        .map(|(k, (w, p))| {
            let weight = if k == 0 || k == last { 0.5 } else { 1.0 };
            weight * mono.response(w) * p
        })
        .sum();
    Ok(sum * grid.spacing())
}

/// Narrow-band SHG delay scan of two identical Gaussian pulses with
/// quadratic dispersion `beta1` on the delayed arm and `beta2` on the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayScan {
    pub sigma: f64,
    pub omega0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub mono: MonochromatorSpec,
    /// One-sided coverage of the input grid in σ.
    pub coverage: f64,
    pub grid_count: usize,
}

impl DelayScan {
    pub fn new(sigma: f64, omega0: f64, beta1: f64, beta2: f64, mono: MonochromatorSpec) -> Self {
        Self {
            sigma,
            omega0,
            beta1,
            beta2,
            mono,
            coverage: DEFAULT_COVERAGE,
            grid_count: DEFAULT_GRID_COUNT,
        }
    }

    pub fn with_grid(mut self, coverage: f64, grid_count: usize) -> Self {
        self.coverage = coverage;
        self.grid_count = grid_count;
        self
    }

    pub fn input_grid(&self) -> Result<FrequencyGrid> {
        make_frequency_grid(self.omega0, self.sigma, self.coverage, self.grid_count)
    }

    /// Trace variance used to size the delay axis: the larger of the
    /// cancelled-dispersion result for the antisymmetric part of (β1, β2)
    /// and the unfiltered result for their sum.
    pub fn expected_variance(&self) -> f64 {
        let antisymmetric = 0.5 * (self.beta1 - self.beta2);
        classical_variance_closed_form(self.sigma, self.mono.sigma_s(), antisymmetric).max(
            general_variance_unequal_dispersion(self.sigma, self.beta1, self.beta2),
        )
    }

    pub fn expected_fwhm(&self) -> f64 {
        fwhm_from_rms(self.expected_variance().sqrt())
    }

    /// `count` delays evenly spread over ±`span_fwhm` expected FWHMs.
    pub fn default_delays(&self, count: usize, span_fwhm: f64) -> Vec<f64> {
        symmetric_delays(span_fwhm * self.expected_fwhm(), count)
    }

    pub fn run(&self, delays: &[f64]) -> Result<CorrelationTrace> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "carrier frequency must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.beta1.is_finite() && self.beta2.is_finite()) {
            return Err(Error::InvalidParameter("dispersion must be finite".into()));
        }
        let grid = self.input_grid()?;
        let carrier = gaussian_field_spectrum(&grid, self.omega0, self.sigma)?;
        let arm1 = apply_quadratic_dispersion(&carrier, &DispersionSpec::new(self.beta1, self.omega0)?);
        let arm2 = DispersionSpec::new(self.beta2, self.omega0)?;

        let raw = match self.filter_sampling(&grid) {
            None => {
                let second = apply_quadratic_dispersion(&carrier, &arm2);
                delays
                    .iter()
                    .map(|&tau| {
                        let shg = shg_spectrum(&apply_delay(&arm1, tau), &second)?;
                        monochromator_signal(&shg, &self.mono)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Some((fine_spacing, half_count)) => {
                self.scan_fine(&grid, &arm1, &arm2, delays, fine_spacing, half_count)?
            }
        };
        CorrelationTrace::normalized(delays.to_vec(), raw)
    }

    /// Spacing and half-count of the sub-grid on which the SHG amplitude is
    /// sampled around the filter centre, or `None` when the native grid
    /// already resolves the filter.
    fn filter_sampling(&self, grid: &FrequencyGrid) -> Option<(f64, usize)> {
        let sigma_s = self.mono.sigma_s();
        let band = std::f64::consts::SQRT_2 * (grid.count() / 2) as f64 * grid.spacing();
        let half_width = (8.0 * sigma_s).min(band);
        let mut spacing = sigma_s / 4.0;
        let mismatch = (self.beta1 - self.beta2).abs();
        if mismatch > 0.0 {
            // |E_SHG(Ω)|² drifts with 2βΩ; resolve its width 1/(|β1−β2|σ)
            spacing = spacing.min(1.0 / (4.0 * mismatch * self.sigma));
        }
        if spacing >= grid.spacing() {
            return None;
        }
        let half_count = ((half_width / spacing).ceil() as usize).max(8);
        Some((spacing, half_count))
    }

    fn scan_fine(
        &self,
        grid: &FrequencyGrid,
        arm1: &SpectralAmplitude,
        arm2: &DispersionSpec,
        delays: &[f64],
        fine_spacing: f64,
        half_count: usize,
    ) -> Result<Vec<f64>> {
        let n = grid.count();
        let delayed: Vec<SpectralAmplitude> = delays.iter().map(|&tau| apply_delay(arm1, tau)).collect();
        let fine_grid = FrequencyGrid::new(2.0 * self.omega0, fine_spacing, 2 * half_count)?;
        let mut shg = vec![vec![Complex64::new(0.0, 0.0); fine_grid.count()]; delays.len()];
        for m in 0..fine_grid.count() {
            let offset = fine_grid.frequency(m) - fine_grid.center();
            let shifted = grid.shifted(offset);
            let second = apply_quadratic_dispersion(
                &gaussian_field_spectrum(&shifted, self.omega0, self.sigma)?,
                arm2,
            );
            // reversed so the convolution sample becomes a dot product
            let b = second.samples();
            let reversed: Vec<Complex64> = (1..n).map(|k| b[n - k]).collect();
            for (row, first) in shg.iter_mut().zip(&delayed) {
                let a = &first.samples()[1..];
                let acc: Complex64 = a.iter().zip(&reversed).map(|(x, y)| x * y).sum();
                row[m] = acc * grid.spacing();
            }
        }
        shg.into_iter()
            .map(|row| monochromator_signal(&SpectralAmplitude::new(fine_grid, row)?, &self.mono))
            .collect()
    }
}

/// `count` evenly spaced delays over `[-half_span, half_span]`.
pub fn symmetric_delays(half_span: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![0.0; count];
    }
    let step = 2.0 * half_span / (count - 1) as f64;
    (0..count)
        .map(|k| {
            let j = k as f64 - (count - 1) as f64 / 2.0;
            j * step
        })
        .collect()
}

/// Runs a narrow-band SHG delay scan on the default grid.
pub fn delay_scan(
    sigma: f64,
    omega0: f64,
    beta1: f64,
    beta2: f64,
    mono: &MonochromatorSpec,
    delays: &[f64],
) -> Result<CorrelationTrace> {
    DelayScan::new(sigma, omega0, beta1, beta2, *mono).run(delays)
}

/// Normalised trace for β2 = −β1:
/// exp[−σ²(σ²+σ_s²)τ² / (2(σ²+σ_s²+4β1²σ⁴σ_s²))].
pub fn classical_trace_closed_form(sigma: f64, sigma_s: f64, beta1: f64, tau: f64) -> f64 {
    let s2 = sigma * sigma;
    let ss2 = sigma_s * sigma_s;
    let num = s2 * (s2 + ss2) * tau * tau;
    let den = 2.0 * (s2 + ss2 + 4.0 * beta1 * beta1 * s2 * s2 * ss2);
    (-num / den).exp()
}

/// Variance of the β2 = −β1 trace: (1/σ²)(1 + 4β1²σ⁴σ_s²/(σ²+σ_s²)).
pub fn classical_variance_closed_form(sigma: f64, sigma_s: f64, beta1: f64) -> f64 {
    let s2 = sigma * sigma;
    let ss2 = sigma_s * sigma_s;
    (1.0 + 4.0 * beta1 * beta1 * s2 * s2 * ss2 / (s2 + ss2)) / s2
}

/// Variance of the trace for arbitrary (β1, β2) in the σ_s → 0 limit:
/// (1/σ²)(1 + (β1+β2)²σ⁴).
pub fn general_variance_unequal_dispersion(sigma: f64, beta1: f64, beta2: f64) -> f64 {
    let s2 = sigma * sigma;
    let b = beta1 + beta2;
    (1.0 + b * b * s2 * s2) / s2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_frequency_grid;

    const SIGMA: f64 = 0.1191;
    const OMEGA0: f64 = 2.334;
    const SIGMA_S: f64 = 9.80e-5;

    fn mono() -> MonochromatorSpec {
        MonochromatorSpec::new(2.0 * OMEGA0, SIGMA_S).unwrap()
    }

    fn pulse(count: usize) -> SpectralAmplitude {
        let grid = make_frequency_grid(OMEGA0, SIGMA, 8.0, count).unwrap();
        gaussian_field_spectrum(&grid, OMEGA0, SIGMA).unwrap()
    }

    #[test]
    fn gaussian_self_convolution() {
        let e = pulse(1024);
        let shg = shg_spectrum(&e, &e).unwrap();
        let g = shg.grid();
        assert_eq!(g.center(), 2.0 * OMEGA0);
        assert_eq!(g.spacing(), e.grid().spacing());
        // ∫ exp(−x²/2σ²) exp(−(Ω−x)²/2σ²) dx = √π σ exp(−Ω²/(4σ²))
        let peak = std::f64::consts::PI.sqrt() * SIGMA;
        let width = std::f64::consts::SQRT_2 * SIGMA;
        let max_err = g
            .frequencies()
            .zip(shg.samples())
            .map(|(w, z)| {
                let x = w - 2.0 * OMEGA0;
                (z - Complex64::new(peak * (-x * x / (2.0 * width * width)).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12 * peak, "{max_err}");
    }

    #[test]
    fn zero_input_and_commutativity() {
        let e = pulse(512);
        let chirped = apply_quadratic_dispersion(&e, &DispersionSpec::new(300.0, OMEGA0).unwrap());
        let zero = SpectralAmplitude::zeros(*e.grid());
        assert!(shg_spectrum(&zero, &e).unwrap().samples().iter().all(|z| z.norm() == 0.0));

        let ab = shg_spectrum_direct(&apply_delay(&e, 20.0), &chirped).unwrap();
        let ba = shg_spectrum_direct(&chirped, &apply_delay(&e, 20.0)).unwrap();
        for (x, y) in ab.samples().iter().zip(ba.samples()) {
            assert!((x - y).norm() <= 1e-14);
        }
    }

    #[test]
    fn direct_and_fft_paths_agree() {
        let e = pulse(1024);
        let a = apply_delay(&apply_quadratic_dispersion(&e, &DispersionSpec::new(850.0, OMEGA0).unwrap()), 15.0);
        let b = apply_quadratic_dispersion(&e, &DispersionSpec::new(-850.0, OMEGA0).unwrap());
        let fft = shg_spectrum(&a, &b).unwrap();
        let direct = shg_spectrum_direct(&a, &b).unwrap();
        let scale = direct.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in fft.samples().iter().zip(direct.samples()) {
            assert!((x - y).norm() <= 1e-9 * scale);
        }
        let center = shg_amplitude_at_center(&a, &b).unwrap();
        let c = direct.grid().center_index();
        assert!((center - direct.samples()[c]).norm() <= 1e-12 * scale);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = pulse(512);
        let b = pulse(1024);
        assert!(matches!(shg_spectrum(&a, &b), Err(Error::GridMismatch(_))));
        assert!(matches!(shg_spectrum_direct(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn flat_filter_collects_total_energy() {
        let e = pulse(1024);
        let shg = shg_spectrum(&e, &e).unwrap();
        let wide = MonochromatorSpec::new(2.0 * OMEGA0, 100.0 * SIGMA).unwrap();
        let signal = monochromator_signal(&shg, &wide).unwrap();
        assert!((signal / shg.energy() - 1.0).abs() < 0.01);
    }

    #[test]
    fn narrow_filter_samples_center() {
        let e = pulse(1024);
        let shg = shg_spectrum(&e, &e).unwrap();
        let sigma_s = shg.grid().spacing();
        let narrow = MonochromatorSpec::new(2.0 * OMEGA0, sigma_s).unwrap();
        let signal = monochromator_signal(&shg, &narrow).unwrap();
        let center = shg.samples()[shg.grid().center_index()].norm_sqr();
        let expected = center * (2.0 * std::f64::consts::PI).sqrt() * sigma_s;
        assert!((signal / expected - 1.0).abs() < 1e-3, "{}", signal / expected);
    }

    #[test]
    fn signal_scales_with_fourth_power() {
        let e = pulse(512);
        let a = 1.7;
        let m = MonochromatorSpec::new(2.0 * OMEGA0, 0.01).unwrap();
        let base = monochromator_signal(&shg_spectrum(&e, &e).unwrap(), &m).unwrap();
        let scaled = monochromator_signal(&shg_spectrum(&e.scaled(a), &e.scaled(a)).unwrap(), &m).unwrap();
        assert!((scaled / base - a.powi(4)).abs() < 1e-10);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(classical_trace_closed_form(SIGMA, SIGMA_S, 850.0, 0.0), 1.0);
        let tau = 12.0;
        let limit = classical_trace_closed_form(SIGMA, 0.0, 0.0, tau);
        assert!((limit - (-SIGMA * SIGMA * tau * tau / 2.0).exp()).abs() < 1e-15);

        let inv = 1.0 / (SIGMA * SIGMA);
        assert!((classical_variance_closed_form(SIGMA, SIGMA_S, 0.0) - inv).abs() < 1e-12);
        assert!((classical_variance_closed_form(SIGMA, 0.0, 1e5) - inv).abs() < 1e-12);
        let v = classical_variance_closed_form(SIGMA, SIGMA_S, 850.0);
        assert!((v - 70.5).abs() < 0.1, "{v}");
        assert!(v / inv - 1.0 < 1e-3);

        assert!((general_variance_unequal_dispersion(SIGMA, 850.0, -850.0) - inv).abs() < 1e-12);
        let single = general_variance_unequal_dispersion(SIGMA, 850.0, 0.0);
        assert!((single * SIGMA * SIGMA - 146.5).abs() < 1.0);
        assert!((single - 1.03e4).abs() < 0.01e4);
        assert_eq!(
            general_variance_unequal_dispersion(SIGMA, 300.0, 20.0),
            general_variance_unequal_dispersion(SIGMA, 20.0, 300.0)
        );
    }

    #[test]
    fn scan_matches_closed_form_point() {
        let delays = symmetric_delays(100.0, 41);
        let trace = delay_scan(SIGMA, OMEGA0, 850.0, -850.0, &mono(), &delays).unwrap();
        let k = delays.iter().position(|&d| d == 10.0).unwrap();
        let expected = classical_trace_closed_form(SIGMA, SIGMA_S, 850.0, 10.0);
        assert!((trace.intensities()[k] / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn trace_validation() {
        assert!(CorrelationTrace::normalized(vec![0.0; 10], vec![1.0; 10]).is_err());
        let d = symmetric_delays(10.0, 40);
        assert!(CorrelationTrace::normalized(d.clone(), vec![0.0; 40]).is_err());
        assert!(CorrelationTrace::normalized(d.clone(), vec![-1.0; 40]).is_err());
        let t = CorrelationTrace::normalized(d, (0..40).map(|k| k as f64).collect()).unwrap();
        assert_eq!(t.intensities()[39], 1.0);
    }
}
