//! Deterministic CSV/JSON emission.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dispcancel_core::biphoton::TwoTimeDistribution;
use dispcancel_core::shg::CorrelationTrace;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::scenarios::{Fig3Panel, RunSummary};

/// Significant digits of every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Largest number of samples per axis in a 2D slice file.
pub const SLICE_SAMPLES_PER_AXIS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(value: f64) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, value)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text for `value` rounded to [`SIGNIFICANT_DIGITS`] digits;
/// exponent notation outside [1e-4, 1e9).
pub fn format_float(value: f64) -> String {
    let rounded = round_significant(value);
    let magnitude = rounded.abs();
    if rounded == 0.0 {
        "0".to_string()
    } else if (1e-4..1e9).contains(&magnitude) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// `tau_fs,intensity_norm` table of a delay trace.
pub fn trace_csv(trace: &CorrelationTrace) -> String {
    csv_text(
        &["tau_fs", "intensity_norm"],
        trace
            .delays()
            .iter()
            .zip(trace.intensities())
            .map(|(t, v)| vec![format_float(*t), format_float(*v)]),
    )
}

/// Down-sampled `t1_fs,t2_fs,probability` slice of a coincidence density.
pub fn slice_csv(dist: &TwoTimeDistribution) -> String {
    let count = dist.sum_times().len().max(dist.difference_times().len());
    let stride = count.div_ceil(SLICE_SAMPLES_PER_AXIS);
    csv_text(
        &["t1_fs", "t2_fs", "probability"],
        dist.cells(stride)
            .into_iter()
            .map(|(t1, t2, p)| vec![format_float(t1), format_float(t2), format_float(p)]),
    )
}

const SUMMARY_HEADER: [&str; 6] = [
    "scenario",
    "fitted_fwhm_fs",
    "closed_form_fwhm_fs",
    "variance_fs2",
    "bound_fs2",
    "violated",
];

fn summary_cells(s: &RunSummary) -> Vec<String> {
    vec![
        s.scenario.clone(),
        format_float(s.fitted_fwhm_fs),
        format_float(s.closed_form_fwhm_fs),
        format_float(s.variance_fs2),
        format_float(s.bound_fs2),
        s.violated.to_string(),
    ]
}

pub fn summaries_csv(summaries: &[RunSummary]) -> String {
    csv_text(&SUMMARY_HEADER, summaries.iter().map(summary_cells))
}

fn number(value: f64) -> Value {
    json!(round_significant(value))
}

/// RunSummary as a JSON object; the config echo keeps full precision as
/// strings. Wall time is omitted so reruns are byte-identical.
pub fn summary_json(s: &RunSummary) -> Value {
    let config: Map<String, Value> = s
        .config
        .echo_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    json!({
        "scenario": s.scenario,
        "fitted_fwhm_fs": number(s.fitted_fwhm_fs),
        "closed_form_fwhm_fs": number(s.closed_form_fwhm_fs),
        "variance_fs2": number(s.variance_fs2),
        "bound_fs2": number(s.bound_fs2),
        "violated": s.violated,
        "config": config,
    })
}

pub fn summaries_json(summaries: &[RunSummary]) -> String {
    let list: Vec<Value> = summaries.iter().map(summary_json).collect();
    pretty(&Value::Array(list))
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

/// Comparison table of the four dispersion settings.
pub fn fig3_csv(panels: &[Fig3Panel]) -> String {
    let mut header = vec!["panel", "beta1_fs2", "beta2_fs2"];
    header.extend(SUMMARY_HEADER);
    header.extend(["measured_fwhm_fs", "note"]);
    csv_text(
        &header,
        panels.iter().map(|p| {
            let mut row = vec![p.label.to_string(), format_float(p.beta1), format_float(p.beta2)];
            row.extend(summary_cells(&p.summary));
            row.extend([format_float(p.measured_fwhm_fs), p.note.to_string()]);
            row
        }),
    )
}

pub fn fig3_json(panels: &[Fig3Panel]) -> String {
    let list: Vec<Value> = panels
        .iter()
        .map(|p| {
            let mut entry = summary_json(&p.summary);
            let map = entry.as_object_mut().expect("summary is an object");
            map.insert("panel".into(), json!(p.label.to_string()));
            map.insert("beta1_fs2".into(), number(p.beta1));
            map.insert("beta2_fs2".into(), number(p.beta2));
            map.insert("measured_fwhm_fs".into(), number(p.measured_fwhm_fs));
            map.insert("note".into(), json!(p.note));
            entry
        })
        .collect();
    pretty(&Value::Array(list))
}

/// Writes files under one output directory.
#[derive(Debug, Clone)]
pub struct OutputSink {
    dir: PathBuf,
    format: OutputFormat,
}

impl OutputSink {
    pub fn new(dir: impl Into<PathBuf>, format: OutputFormat) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, format })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name` and returns its path.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }

    /// Writes `<stem>.csv` and/or `<stem>.json` per the chosen format.
    pub fn write_table(&self, stem: &str, csv: impl FnOnce() -> String, json: impl FnOnce() -> String) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::new();
        if self.format.csv() {
            written.push(self.write(&format!("{stem}.csv"), &csv())?);
        }
        if self.format.json() {
            written.push(self.write(&format!("{stem}.json"), &json())?);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_nine_significant_digits() {
        assert_eq!(format_float(19.812345678912), "19.8123457");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-850.0), "-850");
        assert_eq!(format_float(1.234567891234e-7), "1.23456789e-7");
        assert_eq!(format_float(4.1093e4), "41093");
        assert_eq!(round_significant(2.0 / 3.0), 0.666666667);
    }

    #[test]
    fn trace_table_layout() {
        let delays: Vec<f64> = (0..32).map(|k| k as f64 - 16.0).collect();
        let raw: Vec<f64> = delays.iter().map(|t| (-t * t / 50.0).exp()).collect();
        let trace = CorrelationTrace::normalized(delays, raw).unwrap();
        let text = trace_csv(&trace);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau_fs,intensity_norm"));
        let first = format!("-16,{}", format_float((-256.0f64 / 50.0).exp()));
        assert_eq!(lines.next(), Some(first.as_str()));
        assert_eq!(text.lines().count(), 33);
    }
}
