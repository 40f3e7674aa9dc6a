//! Energy-time entangled photon pairs: Gaussian joint spectral amplitude,
//! dispersion on each photon and the two-time coincidence distribution.
//!
//! The amplitude is sampled on rotated axes, the sum frequency
//! Σ = ω1 + ω2 and the difference frequency Δ = ω1 − ω2. Their Fourier
//! conjugates are T/2 and τ/2 with T = t1 + t2 and τ = t1 − t2, so the
//! narrow pump-set width along Σ and the broad photon width along Δ get
//! independent sampling.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::spectral::{FrequencyGrid, MIN_GRID_COUNT};
use crate::{Error, Result};

/// Default per-axis sample count of 2D grids.
pub const DEFAULT_GRID_COUNT_2D: usize = 512;

/// Largest edge-to-peak density ratio tolerated in the time window.
pub const WINDOW_EDGE_LIMIT: f64 = 1e-6;

/// Half-width of both frequency span and time window, in rms widths.
const WINDOW_RMS: f64 = 6.0;

/// Sum- and difference-frequency sampling of a two-photon amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonGrids {
    /// Samples of ω1 + ω2, centred on 2ω0.
    pub sum: FrequencyGrid,
    /// Samples of ω1 − ω2, centred on 0.
    pub difference: FrequencyGrid,
}

impl BiphotonGrids {
    /// Sizes both axes so that the amplitude and the coincidence
    /// distribution each fit within their windows at ±6 rms.
    ///
    /// `max_beta` is the largest |β| that will be applied to either photon.
    /// When a window cannot hold both, frequency coverage wins and the time
    /// window is checked later by [`two_time_probability`].
    pub fn auto(omega0: f64, sigma: f64, sigma_c: f64, max_beta: f64, count: usize) -> Result<Self> {
        check_state_parameters(omega0, sigma, sigma_c)?;
        if count < MIN_GRID_COUNT {
            return Err(Error::InvalidParameter(format!(
                "grid count must be at least {MIN_GRID_COUNT}, got {count}"
            )));
        }
        let s2 = sigma * sigma;
        let chirp = 4.0 * max_beta * max_beta * s2;
        let diff_rms = std::f64::consts::SQRT_2 * sigma;
        let sum_rms = 1.0 / (0.5 / s2 + 1.0 / (sigma_c * sigma_c)).sqrt();
        let tau_rms = (1.0 / s2 + chirp).sqrt();
        let total_rms = (1.0 / s2 + 2.0 / (sigma_c * sigma_c) + chirp).sqrt();

        let spacing = |freq_rms: f64, time_rms: f64| {
            let coarsest = 4.0 * std::f64::consts::PI / (2.0 * WINDOW_RMS * time_rms);
            let finest = 2.0 * WINDOW_RMS * freq_rms / count as f64;
            if finest <= coarsest {
                (finest * coarsest).sqrt()
            } else {
                finest
            }
        };
        Ok(Self {
            sum: FrequencyGrid::new(2.0 * omega0, spacing(sum_rms, total_rms), count)?,
            difference: FrequencyGrid::new(0.0, spacing(diff_rms, tau_rms), count)?,
        })
    }
}

fn check_state_parameters(omega0: f64, sigma: f64, sigma_c: f64) -> Result<()> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidParameter(format!("ω0 must be positive, got {omega0}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("σ must be positive, got {sigma}")));
    }
    if !(sigma_c > 0.0 && sigma_c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "σ_c must be positive and finite on a grid, got {sigma_c}"
        )));
    }
    Ok(())
}

/// Two-photon spectral amplitude f(ω1, ω2) on rotated axes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    omega0: f64,
    sigma: f64,
    sigma_c: f64,
    grids: BiphotonGrids,
    /// Indexed `[sum, difference]`.
    samples: Array2<Complex64>,
    beta1: f64,
    beta2: f64,
}

impl JointSpectralAmplitude {
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma_c(&self) -> f64 {
        self.sigma_c
    }

    pub fn grids(&self) -> &BiphotonGrids {
        &self.grids
    }

    pub fn samples(&self) -> &Array2<Complex64> {
        &self.samples
    }

    /// Total dispersion applied so far to photon 1 and photon 2.
    pub fn applied_dispersion(&self) -> (f64, f64) {
        (self.beta1, self.beta2)
    }

    /// (ω1, ω2) of the cell at `[sum_index, difference_index]`.
    pub fn mode_frequencies(&self, sum_index: usize, difference_index: usize) -> (f64, f64) {
        let total = self.grids.sum.frequency(sum_index);
        let diff = self.grids.difference.frequency(difference_index);
        (0.5 * (total + diff), 0.5 * (total - diff))
    }

    fn map_cells(&self, f: impl Fn(f64, f64, Complex64) -> Complex64) -> Array2<Complex64> {
        Array2::from_shape_fn(self.samples.dim(), |(i, j)| {
            let (w1, w2) = self.mode_frequencies(i, j);
            f(w1, w2, self.samples[[i, j]])
        })
    }
}

/// Samples
/// f = exp(−(ω1−ω0)²/2σ²) · exp(−(ω2−ω0)²/2σ²) · exp(−(ω1+ω2−2ω0)²/2σ_c²).
pub fn joint_spectral_amplitude(
    omega0: f64,
    sigma: f64,
    sigma_c: f64,
    grids: &BiphotonGrids,
) -> Result<JointSpectralAmplitude> {
    check_state_parameters(omega0, sigma, sigma_c)?;
    // ±6σ on each photon corresponds to ±6√2σ along the difference axis
    grids
        .difference
        .ensure_covers(0.0, WINDOW_RMS * std::f64::consts::SQRT_2 * sigma)?;
    let sum_rms = 1.0 / (0.5 / (sigma * sigma) + 1.0 / (sigma_c * sigma_c)).sqrt();
    grids.sum.ensure_covers(2.0 * omega0, WINDOW_RMS * sum_rms)?;

    let (a, c) = (0.5 / (sigma * sigma), 0.5 / (sigma_c * sigma_c));
    let samples = Array2::from_shape_fn((grids.sum.count(), grids.difference.count()), |(i, j)| {
        let total = grids.sum.frequency(i);
        let diff = grids.difference.frequency(j);
        let x = 0.5 * (total + diff) - omega0;
        let y = 0.5 * (total - diff) - omega0;
        let s = total - 2.0 * omega0;
        Complex64::new((-a * (x * x + y * y) - c * s * s).exp(), 0.0)
    });
    Ok(JointSpectralAmplitude {
        omega0,
        sigma,
        sigma_c,
        grids: *grids,
        samples,
        beta1: 0.0,
        beta2: 0.0,
    })
}

/// Multiplies by exp(iβ1(ω1−ω0)²) · exp(iβ2(ω2−ω0)²).
pub fn apply_dispersion_jsa(jsa: &JointSpectralAmplitude, beta1: f64, beta2: f64) -> JointSpectralAmplitude {
    let w0 = jsa.omega0;
    let samples = jsa.map_cells(|w1, w2, z| {
        let (x, y) = (w1 - w0, w2 - w0);
        z * Complex64::cis(beta1 * x * x + beta2 * y * y)
    });
    JointSpectralAmplitude {
        samples,
        beta1: jsa.beta1 + beta1,
        beta2: jsa.beta2 + beta2,
        ..jsa.clone()
    }
}

/// Coincidence density over (τ, T) = (t1 − t2, t1 + t2).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeDistribution {
    sum_times: Vec<f64>,
    difference_times: Vec<f64>,
    /// Density per unit t1·t2 area, indexed `[sum, difference]`.
    values: Array2<f64>,
}

impl TwoTimeDistribution {
    /// Wraps non-negative weights on uniform (T, τ) axes and normalises
    /// them to a density with unit total probability.
    pub fn new(sum_times: Vec<f64>, difference_times: Vec<f64>, weights: Array2<f64>) -> Result<Self> {
        if weights.dim() != (sum_times.len(), difference_times.len()) {
            return Err(Error::InvalidParameter(format!(
                "weights {:?} do not match axes ({}, {})",
                weights.dim(),
                sum_times.len(),
                difference_times.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and non-negative".into()));
        }
        let mut dist = Self {
            sum_times,
            difference_times,
            values: weights,
        };
        let total = dist.values.sum() * dist.cell_area();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("distribution carries no probability".into()));
        }
        dist.values.mapv_inplace(|v| v / total);
        Ok(dist)
    }

    pub fn sum_times(&self) -> &[f64] {
        &self.sum_times
    }

    pub fn difference_times(&self) -> &[f64] {
        &self.difference_times
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    fn step(axis: &[f64]) -> f64 {
        if axis.len() > 1 {
            (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
        } else {
            1.0
        }
    }

    /// Area of one cell in the (t1, t2) plane, dT·dτ/2.
    pub fn cell_area(&self) -> f64 {
        0.5 * Self::step(&self.sum_times) * Self::step(&self.difference_times)
    }

    pub fn total_probability(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    /// Probability mass of each τ column.
    pub fn difference_marginal(&self) -> Vec<f64> {
        let area = self.cell_area();
        self.values.columns().into_iter().map(|c| c.sum() * area).collect()
    }

    /// Probability mass of each T row.
    pub fn sum_marginal(&self) -> Vec<f64> {
        let area = self.cell_area();
        self.values.rows().into_iter().map(|r| r.sum() * area).collect()
    }

    /// Variance of t1 + t2.
    pub fn sum_variance(&self) -> f64 {
        variance(&self.sum_times, &self.sum_marginal())
    }

    /// Every `stride`-th cell along both axes as (t1, t2, probability mass).
    pub fn cells(&self, stride: usize) -> Vec<(f64, f64, f64)> {
        let stride = stride.max(1);
        let area = self.cell_area();
        let mut out = Vec::new();
        for i in (0..self.sum_times.len()).step_by(stride) {
            for j in (0..self.difference_times.len()).step_by(stride) {
                let (total, diff) = (self.sum_times[i], self.difference_times[j]);
                out.push((0.5 * (total + diff), 0.5 * (total - diff), self.values[[i, j]] * area));
            }
        }
        out
    }

    /// Largest density on the outermost rows and columns relative to the
    /// peak.
    pub fn edge_ratio(&self) -> f64 {
        let (rows, cols) = self.values.dim();
        let peak = self.values.iter().copied().fold(0.0, f64::max);
        let mut edge = 0.0f64;
        for j in 0..cols {
            edge = edge.max(self.values[[0, j]]).max(self.values[[rows - 1, j]]);
        }
        for i in 0..rows {
            edge = edge.max(self.values[[i, 0]]).max(self.values[[i, cols - 1]]);
        }
        edge / peak
    }
}

fn variance(x: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mean = x.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
    x.iter().zip(weights).map(|(x, w)| w * (x - mean) * (x - mean)).sum::<f64>() / total
}

fn centred_inverse_fft(lane: &mut [Complex64], fft: &dyn rustfft::Fft<f64>) {
    for (k, z) in lane.iter_mut().enumerate() {
        if k % 2 == 1 {
            *z = -*z;
        }
    }
    fft.process(lane);
}

/// P(t1, t2) ∝ |∬ f(ω1, ω2) e^{i(ω1 t1 + ω2 t2)} dω1 dω2|², normalised.
///
/// Fails with [`Error::WindowOverflow`] when the density at the window edge
/// exceeds [`WINDOW_EDGE_LIMIT`] of its peak.
pub fn two_time_probability(jsa: &JointSpectralAmplitude) -> Result<TwoTimeDistribution> {
    let (rows, cols) = jsa.samples.dim();
    let mut work = jsa.samples.clone();
    let mut planner = FftPlanner::new();

    let row_fft = planner.plan_fft_inverse(cols);
    for mut row in work.rows_mut() {
        let lane = row.as_slice_mut().expect("standard layout");
        centred_inverse_fft(lane, row_fft.as_ref());
    }
    let col_fft = planner.plan_fft_inverse(rows);
    let mut buffer = vec![Complex64::new(0.0, 0.0); rows];
    for mut col in work.columns_mut() {
        buffer.iter_mut().zip(col.iter()).for_each(|(b, z)| *b = *z);
        centred_inverse_fft(&mut buffer, col_fft.as_ref());
        col.iter_mut().zip(&buffer).for_each(|(z, b)| *z = *b);
    }

    // conjugate variables are T/2 and τ/2
    let sum_times = jsa.grids.sum.times().into_iter().map(|u| 2.0 * u).collect();
    let difference_times = jsa.grids.difference.times().into_iter().map(|v| 2.0 * v).collect();
    let dist = TwoTimeDistribution::new(sum_times, difference_times, work.mapv(|z| z.norm_sqr()))?;
    let edge_ratio = dist.edge_ratio();
    if edge_ratio > WINDOW_EDGE_LIMIT {
        return Err(Error::WindowOverflow {
            edge_ratio,
            limit: WINDOW_EDGE_LIMIT,
        });
    }
    Ok(dist)
}

/// Δ(t1 − t2)² by direct summation over the grid.
pub fn time_difference_variance(dist: &TwoTimeDistribution) -> f64 {
    variance(&dist.difference_times, &dist.difference_marginal())
}

/// Closed-form time-difference variance for β2 = −β1:
/// (1/σ²)(1 + 4β1²σ⁴σ_c²/(2σ²+σ_c²)).
pub fn quantum_variance_closed_form(sigma: f64, sigma_c: f64, beta1: f64) -> f64 {
    let s2 = sigma * sigma;
    let c2 = sigma_c * sigma_c;
    (1.0 + 4.0 * beta1 * beta1 * s2 * s2 * c2 / (2.0 * s2 + c2)) / s2
}

/// Unnormalised closed-form coincidence density for β2 = −β1.
pub fn coincidence_probability_closed_form(sigma: f64, sigma_c: f64, beta1: f64, t1: f64, t2: f64) -> f64 {
    let s2 = sigma * sigma;
    let c2 = sigma_c * sigma_c;
    let d = t1 - t2;
    let num = d * d * s2 * s2 + (t1 * t1 + t2 * t2) * s2 * c2;
    let den = 2.0 * s2 + c2 + 4.0 * beta1 * beta1 * s2 * s2 * c2;
    (-num / den).exp()
}

/// Narrow-pump approximation of the time-difference variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallPumpVariance {
    pub value: f64,
    /// False when σ_c > σ/10, where the approximation is not meant to hold.
    pub in_regime: bool,
}

impl SmallPumpVariance {
    pub fn warning(&self) -> Option<&'static str> {
        (!self.in_regime).then_some("σ_c exceeds σ/10; narrow-pump approximation is unreliable")
    }
}

/// (1/σ²)(1 + 2β1²σ²σ_c²).
pub fn approx_variance_small_pump(sigma: f64, sigma_c: f64, beta1: f64) -> SmallPumpVariance {
    let s2 = sigma * sigma;
    SmallPumpVariance {
        value: (1.0 + 2.0 * beta1 * beta1 * s2 * sigma_c * sigma_c) / s2,
        in_regime: sigma_c <= sigma / 10.0,
    }
}
