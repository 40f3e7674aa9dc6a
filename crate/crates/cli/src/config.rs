//! Flat `key = value` scenario configuration.

use std::fmt::Write as _;

use dispcancel_core::spectral::{angular_frequency, sigma_from_fwhm_wavelength};

use crate::error::CliError;

pub const DEFAULT_CENTER_WAVELENGTH_NM: f64 = 807.0;
pub const DEFAULT_FIELD_FWHM_NM: f64 = 97.0;
pub const DEFAULT_BETA1_FS2: f64 = 850.0;
pub const DEFAULT_BETA2_FS2: f64 = -850.0;
pub const DEFAULT_MONO_FWHM_NM: f64 = 0.02;
pub const DEFAULT_SIGMA_C_RATIO: f64 = 0.01;
pub const DEFAULT_DELAY_COUNT: usize = dispcancel_core::shg::DEFAULT_DELAY_COUNT;
pub const DEFAULT_GRID_COUNT: usize = dispcancel_core::spectral::DEFAULT_GRID_COUNT;
pub const DEFAULT_COVERAGE: f64 = dispcancel_core::spectral::DEFAULT_COVERAGE;

/// Fewest delay samples a scan may request.
pub const MIN_DELAY_COUNT: usize = 32;

/// The 2D coincidence grid uses `grid_count / GRID_2D_DIVISOR` samples per
/// axis (512² at the default 4096).
pub const GRID_2D_DIVISOR: usize = 8;

/// Every accepted key, in echo order.
pub const KEYS: [&str; 10] = [
    "center_wavelength",
    "field_fwhm",
    "beta1",
    "beta2",
    "mono_fwhm",
    "sigma_c_ratio",
    "delay_span",
    "delay_count",
    "grid_count",
    "coverage",
];

/// Delay range of a classical scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelaySpan {
    /// ±5 expected FWHM around zero delay.
    Auto,
    /// Full span in fs, centred on zero delay.
    Full(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Carrier wavelength of the fundamental, nm.
    pub center_wavelength: f64,
    /// Intensity-spectrum FWHM of the fundamental, nm.
    pub field_fwhm: f64,
    /// Quadratic spectral phase on arm 1, fs².
    pub beta1: f64,
    /// Quadratic spectral phase on arm 2, fs².
    pub beta2: f64,
    /// Monochromator resolution FWHM at the second-harmonic wavelength, nm.
    pub mono_fwhm: f64,
    /// Pump bandwidth relative to the photon bandwidth, σ_c/σ.
    pub sigma_c_ratio: f64,
    pub delay_span: DelaySpan,
    pub delay_count: usize,
    /// Samples of the 1D frequency grid; the 2D grid uses a fraction.
    pub grid_count: usize,
    /// Half-span of the 1D frequency grid in units of σ.
    pub coverage: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            center_wavelength: DEFAULT_CENTER_WAVELENGTH_NM,
            field_fwhm: DEFAULT_FIELD_FWHM_NM,
            beta1: DEFAULT_BETA1_FS2,
            beta2: DEFAULT_BETA2_FS2,
            mono_fwhm: DEFAULT_MONO_FWHM_NM,
            sigma_c_ratio: DEFAULT_SIGMA_C_RATIO,
            delay_span: DelaySpan::Auto,
            delay_count: DEFAULT_DELAY_COUNT,
            grid_count: DEFAULT_GRID_COUNT,
            coverage: DEFAULT_COVERAGE,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{key}: expected a number, got {value:?}")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("{key}: expected a non-negative integer, got {value:?}")))
}

impl ScenarioConfig {
    /// Parses `key = value` lines on top of the defaults. Blank lines and
    /// `#` comments are ignored; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        let mut seen = Vec::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value, got {raw:?}", number + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::Usage(format!("line {}: {key} given twice", number + 1)));
            }
            config
                .set(key, value.trim())
                .map_err(|e| CliError::Usage(format!("line {}: {}", number + 1, e.message())))?;
            seen.push(key);
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "center_wavelength" => self.center_wavelength = parse_f64(key, value)?,
            "field_fwhm" => self.field_fwhm = parse_f64(key, value)?,
            "beta1" => self.beta1 = parse_f64(key, value)?,
            "beta2" => self.beta2 = parse_f64(key, value)?,
            "mono_fwhm" => self.mono_fwhm = parse_f64(key, value)?,
            "sigma_c_ratio" => self.sigma_c_ratio = parse_f64(key, value)?,
            "delay_span" => {
                self.delay_span = if value.eq_ignore_ascii_case("auto") {
                    DelaySpan::Auto
                } else {
                    DelaySpan::Full(parse_f64(key, value)?)
                }
            }
            "delay_count" => self.delay_count = parse_usize(key, value)?,
            "grid_count" => self.grid_count = parse_usize(key, value)?,
            "coverage" => self.coverage = parse_f64(key, value)?,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown key {key:?}; accepted keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override must look like key=value, got {assignment:?}")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("center_wavelength", self.center_wavelength),
            ("field_fwhm", self.field_fwhm),
            ("mono_fwhm", self.mono_fwhm),
            ("sigma_c_ratio", self.sigma_c_ratio),
        ];
        for (key, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Usage(format!("{key} must be positive, got {value}")));
            }
        }
        for (key, value) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !value.is_finite() {
                return Err(CliError::Usage(format!("{key} must be finite, got {value}")));
            }
        }
        if self.field_fwhm >= self.center_wavelength {
            return Err(CliError::Usage(format!(
                "field_fwhm ({}) must be smaller than center_wavelength ({})",
                self.field_fwhm, self.center_wavelength
            )));
        }
        if let DelaySpan::Full(span) = self.delay_span {
            if !(span > 0.0 && span.is_finite()) {
                return Err(CliError::Usage(format!("delay_span must be positive or auto, got {span}")));
            }
        }
        if self.delay_count < MIN_DELAY_COUNT {
            return Err(CliError::Usage(format!(
                "delay_count must be at least {MIN_DELAY_COUNT}, got {}",
                self.delay_count
            )));
        }
        let min_grid = dispcancel_core::spectral::MIN_GRID_COUNT * GRID_2D_DIVISOR;
        if self.grid_count < min_grid {
            return Err(CliError::Usage(format!(
                "grid_count must be at least {min_grid}, got {}",
                self.grid_count
            )));
        }
        let min_coverage = dispcancel_core::spectral::MIN_COVERAGE;
        if !(self.coverage >= min_coverage && self.coverage.is_finite()) {
            return Err(CliError::Usage(format!(
                "coverage must be at least {min_coverage}, got {}",
                self.coverage
            )));
        }
        Ok(())
    }

    fn value_text(&self, key: &str) -> String {
        match key {
            "center_wavelength" => self.center_wavelength.to_string(),
            "field_fwhm" => self.field_fwhm.to_string(),
            "beta1" => self.beta1.to_string(),
            "beta2" => self.beta2.to_string(),
            "mono_fwhm" => self.mono_fwhm.to_string(),
            "sigma_c_ratio" => self.sigma_c_ratio.to_string(),
            "delay_span" => match self.delay_span {
                DelaySpan::Auto => "auto".to_string(),
                DelaySpan::Full(span) => span.to_string(),
            },
            "delay_count" => self.delay_count.to_string(),
            "grid_count" => self.grid_count.to_string(),
            "coverage" => self.coverage.to_string(),
            _ => unreachable!("not a config key: {key}"),
        }
    }

    /// `(key, value)` pairs whose values parse back to identical bits.
    pub fn echo_pairs(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&k| (k, self.value_text(k))).collect()
    }

    /// Config text that [`ScenarioConfig::parse`] maps back to `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.echo_pairs() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Annotated default configuration.
    pub fn defaults_text() -> String {
        let notes = [
            "carrier wavelength of the fundamental (nm)",
            "intensity-spectrum FWHM of the fundamental (nm)",
            "quadratic spectral phase on arm 1 (fs^2); 850 fs^2 = 38.65 mm of BK7 at 807 nm",
            "quadratic spectral phase on arm 2 (fs^2); opposite sign cancels arm 1",
            "monochromator resolution FWHM at the second-harmonic wavelength (nm)",
            "pump bandwidth / photon bandwidth, quantum scenarios only",
            "full delay span of classical scans (fs), or auto for +-5 expected FWHM",
            "number of delay samples",
            "1D frequency grid samples; 2D coincidence grids use grid_count/8 per axis",
            "1D frequency grid half-span in field rms widths",
        ];
        let defaults = Self::default();
        let mut out = String::from("# dispcancel scenario defaults\n");
        for ((key, value), note) in defaults.echo_pairs().into_iter().zip(notes) {
            let _ = writeln!(out, "# {note}\n{key} = {value}");
        }
        out
    }

    /// Field rms bandwidth σ (rad/fs).
    pub fn sigma(&self) -> Result<f64, CliError> {
        sigma_from_fwhm_wavelength(self.field_fwhm, self.center_wavelength)
            .map_err(|e| CliError::Usage(format!("field bandwidth: {e}")))
    }

    /// Carrier angular frequency ω0 (rad/fs).
    pub fn omega0(&self) -> f64 {
        angular_frequency(self.center_wavelength)
    }

    /// Monochromator rms resolution σ_s (rad/fs), converted at λ/2.
    pub fn sigma_s(&self) -> Result<f64, CliError> {
        sigma_from_fwhm_wavelength(self.mono_fwhm, 0.5 * self.center_wavelength)
            .map_err(|e| CliError::Usage(format!("monochromator bandwidth: {e}")))
    }

    /// Pump rms bandwidth σ_c (rad/fs).
    pub fn sigma_c(&self) -> Result<f64, CliError> {
        Ok(self.sigma_c_ratio * self.sigma()?)
    }

    /// Samples per axis of the 2D coincidence grid.
    pub fn grid_count_2d(&self) -> usize {
        self.grid_count / GRID_2D_DIVISOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_back() {
        let text = ScenarioConfig::defaults_text();
        assert_eq!(ScenarioConfig::parse(&text).unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn echo_round_trips_bit_exactly() {
        let config = ScenarioConfig {
            beta1: 0.1 + 0.2,
            beta2: -1.0 / 3.0,
            mono_fwhm: 1e-7 * std::f64::consts::PI,
            delay_span: DelaySpan::Full(123.456789012345),
            ..ScenarioConfig::default()
        };
        let back = ScenarioConfig::parse(&config.to_text()).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.beta1.to_bits(), config.beta1.to_bits());
        assert_eq!(back.mono_fwhm.to_bits(), config.mono_fwhm.to_bits());
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ScenarioConfig::parse("beta_1 = 3").unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        assert!(err.to_string().contains("beta_1"));
    }

    #[test]
    fn repeated_key_rejected() {
        assert!(ScenarioConfig::parse("beta1 = 1\nbeta1 = 2").is_err());
    }

    #[test]
    fn comments_and_partial_files() {
        let config = ScenarioConfig::parse("# note\n\nbeta2 = 0 # single arm\n").unwrap();
        assert_eq!(config.beta2, 0.0);
        assert_eq!(config.beta1, DEFAULT_BETA1_FS2);
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            "delay_count = 31",
            "mono_fwhm = 0",
            "field_fwhm = -1",
            "grid_count = 64",
            "coverage = 5",
            "delay_span = -3",
            "beta1 = nan",
            "beta1 = abc",
            "no equals sign",
        ] {
            assert!(ScenarioConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn derived_bandwidths() {
        let config = ScenarioConfig::default();
        assert!((config.sigma().unwrap() - 0.11914).abs() < 1e-4);
        assert!((config.sigma_s().unwrap() / 9.8e-5 - 1.0).abs() < 0.01);
        assert_eq!(config.grid_count_2d(), 512);
    }
}
