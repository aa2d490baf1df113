//! Result serialization: the coincidence-histogram text format, the run
//! summary format, and file helpers that attach path context to I/O errors.
//!
//! Histogram files carry the exact bin geometry and start count in leading
//! `#` comment lines (values in seconds, shortest round-tripping form), then
//! a `bin_start_ns,bin_end_ns,counts` header and one row per bin with edges
//! in nanoseconds for human consumption. Import reads the comment lines, so
//! `import(export(h)) == h` bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::parse_config;
use crate::detection::TacHistogram;
use crate::error::{Result, SimError};
use crate::experiments::{ExperimentConfig, ScenarioResult};

const HISTOGRAM_HEADER: &str = "bin_start_ns,bin_end_ns,counts";

/// Render a histogram in the export format. Deterministic: identical inputs
/// produce identical bytes.
pub fn histogram_to_string(h: &TacHistogram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# bin_width_s={}", h.bin_width());
    let _ = writeln!(out, "# window_s={}", h.window());
    let _ = writeln!(out, "# n_starts={}", h.n_starts());
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, &c) in h.counts().iter().enumerate() {
        let start = h.bin_start(i);
        let _ = writeln!(out, "{},{},{}", start * 1e9, (start + h.bin_width()) * 1e9, c);
    }
    out
}

/// Parse the export format back into a histogram.
pub fn histogram_from_str(text: &str) -> Result<TacHistogram> {
    let mut bin_width: Option<f64> = None;
    let mut window: Option<f64> = None;
    let mut n_starts: Option<u64> = None;
    let mut counts: Vec<u64> = Vec::new();
    let mut seen_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((key, value)) = comment.split_once('=') {
                let parse = |what: &str| -> Result<f64> {
                    value.trim().parse::<f64>().map_err(|_| {
                        SimError::Format(format!(
                            "histogram line {line_no}: bad {what} value `{}`",
                            value.trim()
                        ))
                    })
                };
                match key.trim() {
                    "bin_width_s" => bin_width = Some(parse("bin width")?),
                    "window_s" => window = Some(parse("window")?),
                    "n_starts" => {
                        n_starts = Some(value.trim().parse().map_err(|_| {
                            SimError::Format(format!(
                                "histogram line {line_no}: bad start count `{}`",
                                value.trim()
                            ))
                        })?)
                    }
                    _ => {} // unknown comments are ignored
                }
            }
            continue;
        }
        if !seen_header {
            if line != HISTOGRAM_HEADER {
                return Err(SimError::Format(format!(
                    "histogram line {line_no}: expected header `{HISTOGRAM_HEADER}`, got `{line}`"
                )));
            }
            seen_header = true;
            continue;
        }
        let count_field = line.split(',').nth(2).ok_or_else(|| {
            SimError::Format(format!("histogram line {line_no}: expected 3 comma-separated fields"))
        })?;
        counts.push(count_field.trim().parse().map_err(|_| {
            SimError::Format(format!(
                "histogram line {line_no}: bad count `{}`",
                count_field.trim()
            ))
        })?);
    }

    if !seen_header {
        return Err(SimError::Format("histogram text has no header line".into()));
    }
    let bin_width =
        bin_width.ok_or_else(|| SimError::Format("histogram text lacks `# bin_width_s=`".into()))?;
    let window =
        window.ok_or_else(|| SimError::Format("histogram text lacks `# window_s=`".into()))?;
    TacHistogram::from_parts(bin_width, window, counts, n_starts.unwrap_or(0))
}

/// Write a histogram file.
pub fn export_histogram(h: &TacHistogram, path: &Path) -> Result<()> {
    std::fs::write(path, histogram_to_string(h))
        .map_err(|e| SimError::Format(format!("cannot write {}: {e}", path.display())))
}

/// Read a histogram file.
pub fn import_histogram(path: &Path) -> Result<TacHistogram> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Format(format!("cannot read {}: {e}", path.display())))?;
    histogram_from_str(&text)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

/// Render the run summary: two comment lines identifying the run, then the
/// stable key set in fixed order ("none" marks fields the scenario does not
/// produce).
pub fn format_summary(result: &ScenarioResult) -> String {
    let s = &result.summary;
    let mut out = String::new();
    let _ = writeln!(out, "# scenario = {}", result.scenario);
    let _ = writeln!(out, "# mode = {}", result.mode);
    let _ = writeln!(out, "visibility = {}", opt(s.visibility));
    let _ = writeln!(out, "S = {}", opt(s.chsh_s));
    let _ = writeln!(out, "singles_a = {}", s.singles_a);
    let _ = writeln!(out, "singles_b = {}", s.singles_b);
    let _ = writeln!(out, "zero_delay_peak = {}", opt(s.zero_delay_peak));
    let _ = writeln!(out, "mean_side_peak = {}", opt(s.mean_side_peak));
    out
}

/// Write the run summary next to a histogram export.
pub fn write_summary(result: &ScenarioResult, path: &Path) -> Result<()> {
    std::fs::write(path, format_summary(result))
        .map_err(|e| SimError::Format(format!("cannot write {}: {e}", path.display())))
}

/// Read and parse a configuration file.
pub fn read_config_file(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Format(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
