//! Levenberg–Marquardt fit of `A·exp(−(τ−c)²/(2w²)) + B` to a trace.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::shg::CorrelationTrace;
use crate::{fwhm_from_rms, Error, Result};

/// Fewest samples at or above half maximum a fit accepts.
pub const MIN_POINTS_ABOVE_HALF: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub center: f64,
    pub rms_width: f64,
    pub fwhm: f64,
    pub amplitude: f64,
    pub baseline: f64,
    /// Root-mean-square residual of the fit.
    pub residual_rms: f64,
}

impl GaussianFit {
    fn from_params(p: &Vector4<f64>, residual_rms: f64) -> Self {
        let rms_width = p[2].abs();
        Self {
            amplitude: p[0],
            center: p[1],
            rms_width,
            fwhm: fwhm_from_rms(rms_width),
            baseline: p[3],
            residual_rms,
        }
    }

    pub fn variance(&self) -> f64 {
        self.rms_width * self.rms_width
    }

    pub fn evaluate(&self, tau: f64) -> f64 {
        let x = (tau - self.center) / self.rms_width;
        self.amplitude * (-0.5 * x * x).exp() + self.baseline
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop once every relative parameter update falls below this.
    pub tolerance: f64,
    pub initial_lambda: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-6,
            initial_lambda: 1e-3,
        }
    }
}

pub fn fit_gaussian_trace(trace: &CorrelationTrace) -> Result<GaussianFit> {
    fit_gaussian(trace.delays(), trace.intensities(), &FitOptions::default())
}

fn residuals(x: &[f64], y: &[f64], p: &Vector4<f64>) -> (Vec<f64>, f64) {
    let r: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&t, &v)| {
            let u = (t - p[1]) / p[2];
            v - (p[0] * (-0.5 * u * u).exp() + p[3])
        })
        .collect();
    let cost = r.iter().map(|e| e * e).sum();
    (r, cost)
}

/// Moment-based starting point: baseline from the minimum, centre and
/// width from the baseline-subtracted first and second moments.
fn moment_estimate(x: &[f64], y: &[f64]) -> Vector4<f64> {
    let floor = y.iter().copied().fold(f64::INFINITY, f64::min);
    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = y.iter().map(|v| v - floor).collect();
    let total: f64 = weights.iter().sum();
    let center = x.iter().zip(&weights).map(|(t, w)| t * w).sum::<f64>() / total;
    let var = x
        .iter()
        .zip(&weights)
        .map(|(t, w)| w * (t - center) * (t - center))
        .sum::<f64>()
        / total;
    Vector4::new(peak - floor, center, var.sqrt(), floor)
}

/// Unweighted least-squares Gaussian-plus-baseline fit.
pub fn fit_gaussian(x: &[f64], y: &[f64], options: &FitOptions) -> Result<GaussianFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "{} abscissae but {} values",
            x.len(),
            y.len()
        )));
    }
    let floor = y.iter().copied().fold(f64::INFINITY, f64::min);
    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let above_half = if peak > floor && peak.is_finite() {
        y.iter().filter(|&&v| v - floor >= 0.5 * (peak - floor)).count()
    } else {
        0
    };
    if above_half < MIN_POINTS_ABOVE_HALF {
        return Err(Error::InsufficientSampling {
            above_half,
            required: MIN_POINTS_ABOVE_HALF,
        });
    }

    let start = moment_estimate(x, y);
    let n = x.len() as f64;
    let mut p = start;
    let (_, mut cost) = residuals(x, y, &p);
    let mut lambda = options.initial_lambda;

    for _ in 0..options.max_iterations {
        let (r, _) = residuals(x, y, &p);
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (&t, &e) in x.iter().zip(&r) {
            let d = t - p[1];
            let w2 = p[2] * p[2];
            let g = (-0.5 * d * d / w2).exp();
            let row = Vector4::new(g, p[0] * g * d / w2, p[0] * g * d * d / (w2 * p[2]), 1.0);
            jtj += row * row.transpose();
            jtr += row * e;
        }

        let mut accepted = None;
        while lambda < 1e12 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let (_, trial_cost) = residuals(x, y, &trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                accepted = Some((step, trial, trial_cost));
                lambda = (lambda * 0.1).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }

        let Some((step, trial, trial_cost)) = accepted else {
            // no downhill step left: at a minimum to working precision
            return Ok(GaussianFit::from_params(&p, (cost / n).sqrt()));
        };
        p = trial;
        cost = trial_cost;
        let scale = p[0].abs().max(f64::MIN_POSITIVE);
        let width = p[2].abs().max(f64::MIN_POSITIVE);
        let relative = [
            step[0].abs() / scale,
            step[1].abs() / width,
            step[2].abs() / width,
            step[3].abs() / scale,
        ];
        if relative.iter().all(|&u| u < options.tolerance) {
            return Ok(GaussianFit::from_params(&p, (cost / n).sqrt()));
        }
    }
    Err(Error::FitFailure {
        iterations: options.max_iterations,
        estimate: Box::new(GaussianFit::from_params(&start, (residuals(x, y, &start).1 / n).sqrt())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(width: f64, center: f64, baseline: f64, span: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..count)
            .map(|k| -span + 2.0 * span * k as f64 / (count - 1) as f64)
            .collect();
        let y = x
            .iter()
            .map(|t| (-(t - center).powi(2) / (2.0 * width * width)).exp() + baseline)
            .collect();
        (x, y)
    }

    #[test]
    fn exact_gaussian_recovered() {
        let (x, y) = samples(9.0, 0.0, 0.0, 100.0, 201);
        let fit = fit_gaussian(&x, &y, &FitOptions::default()).unwrap();
        assert!((fit.rms_width / 9.0 - 1.0).abs() < 1e-6);
        assert!((fit.amplitude - 1.0).abs() < 1e-6);
        assert!(fit.center.abs() < 1e-6 * 9.0);
        assert!(fit.baseline.abs() < 1e-6);
        assert!((fit.fwhm - 2.0 * (2.0 * 2f64.ln()).sqrt() * fit.rms_width).abs() < 1e-12);
        assert!(fit.residual_rms >= 0.0 && fit.residual_rms < 1e-9);
    }

    #[test]
    fn baseline_offset_tolerated() {
        let (x, y) = samples(9.0, 3.0, 0.05, 100.0, 201);
        let fit = fit_gaussian(&x, &y, &FitOptions::default()).unwrap();
        assert!((fit.rms_width / 9.0 - 1.0).abs() < 0.005);
        assert!((fit.baseline - 0.05).abs() < 1e-4);
        assert!((fit.center - 3.0).abs() < 1e-4);
    }

    #[test]
    fn zero_trace_is_insufficient() {
        let x: Vec<f64> = (0..64).map(|k| k as f64).collect();
        let err = fit_gaussian(&x, &[0.0; 64], &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientSampling { above_half: 0, .. }));
    }

    #[test]
    fn narrow_peak_is_insufficient() {
        let (x, y) = samples(1.0, 0.0, 0.0, 100.0, 201);
        assert!(matches!(
            fit_gaussian(&x, &y, &FitOptions::default()),
            Err(Error::InsufficientSampling { .. })
        ));
    }

    #[test]
    fn exhausted_iterations_report_estimate() {
        let (x, y) = samples(9.0, 2.0, 0.1, 20.0, 41);
        let options = FitOptions {
            max_iterations: 1,
            tolerance: 1e-15,
            ..FitOptions::default()
        };
        match fit_gaussian(&x, &y, &options) {
            Err(Error::FitFailure { iterations, estimate }) => {
                assert_eq!(iterations, 1);
                assert!(estimate.rms_width > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
