//! Named scenarios built on the core library.

use std::str::FromStr;
use std::time::Instant;

use dispcancel_core::analysis::{
    check_violation, fit_gaussian_trace, separable_pulse_variance,
    DEFAULT_VIOLATION_TOLERANCE,
};
use dispcancel_core::biphoton::{
    apply_dispersion_jsa, joint_spectral_amplitude, quantum_variance_closed_form,
    time_difference_variance, two_time_probability, BiphotonGrids, TwoTimeDistribution,
};
use dispcancel_core::shg::{
    classical_variance_closed_form, general_variance_unequal_dispersion, symmetric_delays,
    CorrelationTrace, DelayScan, MonochromatorSpec, DEFAULT_DELAY_SPAN_FWHM,
};
use dispcancel_core::spectral::bk7_beta;
use dispcancel_core::fwhm_from_rms;

use crate::config::{DelaySpan, ScenarioConfig};
use crate::error::CliError;

/// Smallest and largest accepted σ_c/σ for quantum runs.
pub const SIGMA_C_RATIO_RANGE: (f64, f64) = (1.0 / 200.0, 10.0);

/// σ_c/σ of the separable reference state in the inequality check.
pub const SEPARABLE_SIGMA_C_RATIO: f64 = 10.0;

/// Outcome of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: String,
    /// FWHM of the Gaussian fitted to the trace (classical) or of the
    /// Gaussian with the computed variance (quantum), fs.
    pub fitted_fwhm_fs: f64,
    pub closed_form_fwhm_fs: f64,
    /// Numerically obtained width variance, fs².
    pub variance_fs2: f64,
    /// Smallest time-difference variance classical pulses can reach, fs².
    pub bound_fs2: f64,
    pub violated: bool,
    /// Excluded from written files so reruns stay byte-identical.
    pub wall_time_ms: f64,
    pub config: ScenarioConfig,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn classical_scan(config: &ScenarioConfig) -> Result<DelayScan, CliError> {
    let omega0 = config.omega0();
    let mono = MonochromatorSpec::new(2.0 * omega0, config.sigma_s()?)
        .map_err(|e| CliError::Usage(format!("monochromator: {e}")))?;
    Ok(DelayScan::new(config.sigma()?, omega0, config.beta1, config.beta2, mono)
        .with_grid(config.coverage, config.grid_count))
}

/// Delays used by a classical scan with this config.
pub fn scan_delays(config: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let scan = classical_scan(config)?;
    Ok(match config.delay_span {
        DelaySpan::Auto => scan.default_delays(config.delay_count, DEFAULT_DELAY_SPAN_FWHM),
        DelaySpan::Full(span) => symmetric_delays(0.5 * span, config.delay_count),
    })
}

/// Delay scan, Gaussian fit, closed-form comparison and the classical
/// (separately timed pulse) verdict against the nonlocal bound.
pub fn run_classical_scan(config: &ScenarioConfig) -> Result<(CorrelationTrace, RunSummary), CliError> {
    const NAME: &str = "classical-scan";
    let start = Instant::now();
    config.validate()?;
    let scan = classical_scan(config)?;
    let delays = scan_delays(config)?;
    let trace = scan.run(&delays).map_err(|e| CliError::computation(NAME, e))?;
    let fit = fit_gaussian_trace(&trace).map_err(|e| CliError::computation(NAME, e))?;

    let sigma = config.sigma()?;
    let closed_form = if config.beta1 + config.beta2 == 0.0 {
        classical_variance_closed_form(sigma, config.sigma_s()?, config.beta1)
    } else {
        general_variance_unequal_dispersion(sigma, config.beta1, config.beta2)
    };
    // the pulses themselves, timed by separate detectors, against the bound
    // for the relative dispersion between the arms
    let beta = 0.5 * (config.beta1 - config.beta2);
    let nonlocal = separable_pulse_variance(sigma, config.beta1, config.beta2);
    let report = check_violation(nonlocal, 1.0 / (sigma * sigma), beta, DEFAULT_VIOLATION_TOLERANCE)
        .map_err(|e| CliError::computation(NAME, e))?;

    let summary = RunSummary {
        scenario: NAME.to_string(),
        fitted_fwhm_fs: fit.fwhm,
        closed_form_fwhm_fs: fwhm_from_rms(closed_form.sqrt()),
        variance_fs2: fit.variance(),
        bound_fs2: report.bound,
        violated: report.violated,
        wall_time_ms: elapsed_ms(start),
        config: config.clone(),
    };
    Ok((trace, summary))
}

fn quantum_distribution(
    config: &ScenarioConfig,
    beta1: f64,
    beta2: f64,
    max_beta: f64,
    name: &str,
) -> Result<TwoTimeDistribution, CliError> {
    let sigma = config.sigma()?;
    let sigma_c = config.sigma_c()?;
    let omega0 = config.omega0();
    let compute = || {
        let grids = BiphotonGrids::auto(omega0, sigma, sigma_c, max_beta, config.grid_count_2d())?;
        let jsa = joint_spectral_amplitude(omega0, sigma, sigma_c, &grids)?;
        two_time_probability(&apply_dispersion_jsa(&jsa, beta1, beta2))
    };
    compute().map_err(|e| CliError::computation(name, e))
}

/// Two-photon coincidence distribution with ±β and the inequality verdict.
pub fn run_quantum_correlation(config: &ScenarioConfig) -> Result<(TwoTimeDistribution, RunSummary), CliError> {
    const NAME: &str = "quantum-correlation";
    let start = Instant::now();
    config.validate()?;
    let (lo, hi) = SIGMA_C_RATIO_RANGE;
    if !(lo..=hi).contains(&config.sigma_c_ratio) {
        return Err(CliError::Usage(format!(
            "sigma_c_ratio must lie in [{lo}, {hi}], got {}",
            config.sigma_c_ratio
        )));
    }
    if config.beta1 + config.beta2 != 0.0 {
        return Err(CliError::Usage(format!(
            "quantum-correlation needs beta2 = -beta1, got beta1 = {}, beta2 = {}",
            config.beta1, config.beta2
        )));
    }
    let max_beta = config.beta1.abs();
    let initial = time_difference_variance(&quantum_distribution(config, 0.0, 0.0, max_beta, NAME)?);
    let dist = quantum_distribution(config, config.beta1, config.beta2, max_beta, NAME)?;
    let measured = time_difference_variance(&dist);
    let report = check_violation(measured, initial, config.beta1, DEFAULT_VIOLATION_TOLERANCE)
        .map_err(|e| CliError::computation(NAME, e))?;
    let closed_form = quantum_variance_closed_form(config.sigma()?, config.sigma_c()?, config.beta1);

    let summary = RunSummary {
        scenario: NAME.to_string(),
        fitted_fwhm_fs: fwhm_from_rms(measured.sqrt()),
        closed_form_fwhm_fs: fwhm_from_rms(closed_form.sqrt()),
        variance_fs2: measured,
        bound_fs2: report.bound,
        violated: report.violated,
        wall_time_ms: elapsed_ms(start),
        config: config.clone(),
    };
    Ok((dist, summary))
}

/// Quantum runs at the configured pump bandwidth and at a separable
/// (broad-pump) reference, in that order.
pub fn run_inequality_check(config: &ScenarioConfig) -> Result<[RunSummary; 2], CliError> {
    let (_, mut entangled) = run_quantum_correlation(config)?;
    entangled.scenario = "inequality-check/configured".to_string();
    let reference = ScenarioConfig {
        sigma_c_ratio: SEPARABLE_SIGMA_C_RATIO,
        ..config.clone()
    };
    let (_, mut separable) = run_quantum_correlation(&reference)?;
    separable.scenario = "inequality-check/separable".to_string();
    Ok([entangled, separable])
}

/// Config key varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Sets beta1 = b, beta2 = −b; classical scans.
    Beta,
    /// Quantum runs.
    SigmaCRatio,
    /// Classical scans.
    MonoFwhm,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::SigmaCRatio => "sigma_c_ratio",
            Self::MonoFwhm => "mono_fwhm",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "beta" => Ok(Self::Beta),
            "sigma_c_ratio" => Ok(Self::SigmaCRatio),
            "mono_fwhm" => Ok(Self::MonoFwhm),
            other => Err(CliError::Usage(format!(
                "unknown sweep parameter {other:?}; expected beta, sigma_c_ratio or mono_fwhm"
            ))),
        }
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("sweep value {s:?} is not a finite number")))
        })
        .collect()
}

/// The config used for one sweep point.
pub fn sweep_point(config: &ScenarioConfig, parameter: SweepParameter, value: f64) -> ScenarioConfig {
    let mut point = config.clone();
    match parameter {
        SweepParameter::Beta => {
            point.beta1 = value;
            point.beta2 = -value;
        }
        SweepParameter::SigmaCRatio => point.sigma_c_ratio = value,
        SweepParameter::MonoFwhm => point.mono_fwhm = value,
    }
    point
}

/// One run per value, in the order given.
pub fn run_sweep(
    config: &ScenarioConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<RunSummary>, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".to_string()));
    }
    values
        .iter()
        .map(|&value| {
            let point = sweep_point(config, parameter, value);
            let mut summary = match parameter {
                SweepParameter::SigmaCRatio => run_quantum_correlation(&point)?.1,
                SweepParameter::Beta | SweepParameter::MonoFwhm => run_classical_scan(&point)?.1,
            };
            summary.scenario = format!("sweep/{}={value}", parameter.name());
            Ok(summary)
        })
        .collect()
}

/// One of the four dispersion settings of the classical comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Panel {
    pub label: char,
    pub beta1: f64,
    pub beta2: f64,
    /// Width measured in the laboratory with a non-Gaussian spectrum, fs.
    pub measured_fwhm_fs: f64,
    pub note: &'static str,
    pub trace: CorrelationTrace,
    pub summary: RunSummary,
}

/// (label, β1, β2, laboratory FWHM, annotation).
pub const FIG3_SETTINGS: [(char, f64, f64, f64, &str); 4] = [
    ('a', 0.0, 0.0, 21.7, "transform limited; Gaussian model is narrower than the measured non-Gaussian spectrum"),
    ('b', 850.0, 0.0, 172.7, "single-arm dispersion; Gaussian model broadens more than the measured spectrum"),
    ('c', 0.0, -850.0, 176.4, "single-arm dispersion of opposite sign; model width equals (b)"),
    ('d', 850.0, -850.0, 21.9, "opposite dispersion in both arms cancels; model width equals (a)"),
];

/// Classical scans at the four dispersion settings; all other parameters
/// come from `config`.
pub fn reproduce_fig3(config: &ScenarioConfig) -> Result<Vec<Fig3Panel>, CliError> {
    FIG3_SETTINGS
        .iter()
        .map(|&(label, beta1, beta2, measured, note)| {
            let point = ScenarioConfig {
                beta1,
                beta2,
                ..config.clone()
            };
            let (trace, mut summary) = run_classical_scan(&point)?;
            summary.scenario = format!("reproduce-fig3/{label}");
            Ok(Fig3Panel {
                label,
                beta1,
                beta2,
                measured_fwhm_fs: measured,
                note,
                trace,
                summary,
            })
        })
        .collect()
}

/// Parsed `bk7-beta` request and result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlassDispersion {
    pub length_mm: f64,
    pub wavelength_nm: f64,
    pub beta_fs2: f64,
}

fn parse_quantity(token: &str, unit: &str) -> Option<f64> {
    token
        .trim_start_matches('@')
        .strip_suffix(unit)
        .and_then(|v| v.trim().parse::<f64>().ok())
}

/// Accepts `<length>mm @<wavelength>nm` in any order, as one or several
/// arguments (e.g. `38.65mm @807nm`).
pub fn run_bk7_beta(args: &[String]) -> Result<GlassDispersion, CliError> {
    let joined = args.join(" ");
    let tokens: Vec<&str> = joined.split_whitespace().filter(|t| *t != "@").collect();
    let mut length = None;
    let mut wavelength = None;
    for token in &tokens {
        if let Some(v) = parse_quantity(token, "mm") {
            length = Some(v);
        } else if let Some(v) = parse_quantity(token, "nm") {
            wavelength = Some(v);
        } else {
            return Err(CliError::Usage(format!(
                "bk7-beta: cannot read {token:?}; expected e.g. 38.65mm @807nm"
            )));
        }
    }
    let (Some(length_mm), Some(wavelength_nm)) = (length, wavelength) else {
        return Err(CliError::Usage(
            "bk7-beta needs a length in mm and a wavelength in nm, e.g. 38.65mm @807nm".to_string(),
        ));
    };
    let beta_fs2 = bk7_beta(length_mm, wavelength_nm).map_err(|e| match e {
        dispcancel_core::Error::InvalidParameter(_) | dispcancel_core::Error::Domain(_) => {
            CliError::Usage(format!("bk7-beta: {e}"))
        }
        other => CliError::computation("bk7-beta", other),
    })?;
    Ok(GlassDispersion {
        length_mm,
        wavelength_nm,
        beta_fs2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parameter_names() {
        for p in [SweepParameter::Beta, SweepParameter::SigmaCRatio, SweepParameter::MonoFwhm] {
            assert_eq!(p.name().parse::<SweepParameter>().unwrap(), p);
        }
        assert!(matches!("gamma".parse::<SweepParameter>(), Err(CliError::Usage(_))));
    }

    #[test]
    fn empty_sweep_is_usage_error() {
        let err = run_sweep(&ScenarioConfig::default(), SweepParameter::Beta, &[]).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
        assert!(parse_values(" , ").unwrap().is_empty());
        assert!(parse_values("1,x").is_err());
    }

    #[test]
    fn single_value_sweep_matches_single_run() {
        let config = ScenarioConfig::default();
        let swept = run_sweep(&config, SweepParameter::Beta, &[400.0]).unwrap();
        let point = sweep_point(&config, SweepParameter::Beta, 400.0);
        let (_, single) = run_classical_scan(&point).unwrap();
        assert_eq!(swept[0].fitted_fwhm_fs, single.fitted_fwhm_fs);
        assert_eq!(swept[0].variance_fs2, single.variance_fs2);
        assert_eq!(swept[0].config, single.config);
    }

    #[test]
    fn bk7_arguments() {
        let args = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        let a = run_bk7_beta(&args("38.65mm @807nm")).unwrap();
        let b = run_bk7_beta(&args("@807nm 38.65mm")).unwrap();
        let c = run_bk7_beta(&args("38.65mm @ 807nm")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!((a.beta_fs2 - 851.0).abs() <= 2.0);
        assert!(run_bk7_beta(&args("38.65mm")).is_err());
        assert!(run_bk7_beta(&args("38.65 807")).is_err());
        assert_eq!(run_bk7_beta(&args("10mm @5000nm")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn quantum_preconditions() {
        let mut config = ScenarioConfig {
            sigma_c_ratio: 20.0,
            ..ScenarioConfig::default()
        };
        assert!(matches!(run_quantum_correlation(&config), Err(CliError::Usage(_))));
        config.sigma_c_ratio = 0.01;
        config.beta2 = 0.0;
        assert!(matches!(run_quantum_correlation(&config), Err(CliError::Usage(_))));
    }

    #[test]
    fn overflow_carries_hint() {
        let config = ScenarioConfig {
            sigma_c_ratio: 10.0,
            beta1: 5000.0,
            beta2: -5000.0,
            grid_count: 2048,
            ..ScenarioConfig::default()
        };
        let err = run_quantum_correlation(&config).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_COMPUTATION);
        assert!(err.to_string().contains("increase grid_count"));
    }
}
