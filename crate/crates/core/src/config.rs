//! Plain-text run configuration: `key = value` lines, `#` comments, and
//! documented defaults for every absent key. Values keep human units
//! (degrees, nanoseconds); the parsed struct converts on access.

use crate::error::{Result, SimError};
use crate::experiments::{ExperimentConfig, RunMode, Scenario};

/// The recognized keys, in canonical serialization order.
const KEYS: [&str; 16] = [
    "alpha",
    "xi",
    "phase_deg",
    "overlap",
    "efficiency",
    "dark_prob",
    "rep_rate_hz",
    "n_pulses",
    "seed",
    "scenario",
    "mode",
    "bin_width_ns",
    "window_ns",
    "delay_pulses",
    "phase_a_deg",
    "phase_b_deg",
];

fn err(line: usize, msg: impl Into<String>) -> SimError {
    SimError::Config { line, msg: msg.into() }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| err(line, format!("key `{key}`: `{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(line, format!("key `{key}`: value must be finite")));
    }
    Ok(v)
}

fn parse_f64_in(key: &str, value: &str, line: usize, lo: f64, hi: f64) -> Result<f64> {
    let v = parse_f64(key, value, line)?;
    if !(lo..=hi).contains(&v) {
        return Err(err(line, format!("key `{key}`: {v} outside valid range [{lo}, {hi}]")));
    }
    Ok(v)
}

fn parse_f64_positive(key: &str, value: &str, line: usize) -> Result<f64> {
    let v = parse_f64(key, value, line)?;
    if v <= 0.0 {
        return Err(err(line, format!("key `{key}`: {v} must be positive")));
    }
    Ok(v)
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64> {
    value
        .parse()
        .map_err(|_| err(line, format!("key `{key}`: `{value}` is not a non-negative integer")))
}

/// Parse a configuration from text. Later lines override earlier ones;
/// unknown keys are rejected with their line number. The lock-phase-error
/// and detector-time-smear knobs are API-only and not part of the format.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{trimmed}`")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(line, format!("key `{key}`: missing value")));
        }
        match key {
            "alpha" => {
                cfg.alpha_mag = if value == "matched" {
                    None
                } else {
                    Some(parse_f64_in(key, value, line, 0.0, 0.5)?)
                };
            }
            "xi" => cfg.xi = parse_f64_in(key, value, line, 0.0, 0.1)?,
            "phase_deg" => cfg.phase_deg = parse_f64(key, value, line)?,
            "overlap" => cfg.overlap = parse_f64_in(key, value, line, 0.0, 1.0)?,
            "efficiency" => cfg.efficiency = parse_f64_in(key, value, line, 0.0, 1.0)?,
            "dark_prob" => cfg.dark_prob = parse_f64_in(key, value, line, 0.0, 1.0)?,
            "rep_rate_hz" => cfg.rep_rate_hz = parse_f64_positive(key, value, line)?,
            "n_pulses" => {
                let n = parse_u64(key, value, line)?;
                if n == 0 {
                    return Err(err(line, "key `n_pulses`: must be at least 1"));
                }
                cfg.n_pulses = n;
            }
            "seed" => cfg.seed = parse_u64(key, value, line)?,
            "scenario" => {
                cfg.scenario = value
                    .parse::<Scenario>()
                    .map_err(|e| err(line, format!("key `scenario`: {e}")))?;
            }
            "mode" => {
                cfg.mode = value
                    .parse::<RunMode>()
                    .map_err(|e| err(line, format!("key `mode`: {e}")))?;
            }
            "bin_width_ns" => cfg.bin_width_ns = parse_f64_positive(key, value, line)?,
            "window_ns" => cfg.window_ns = parse_f64_positive(key, value, line)?,
            "delay_pulses" => {
                let d = parse_u64(key, value, line)?;
                let d32 = u32::try_from(d)
                    .map_err(|_| err(line, format!("key `delay_pulses`: {d} is too large")))?;
                if d32 == 0 {
                    return Err(err(line, "key `delay_pulses`: must be at least 1"));
                }
                cfg.delay_pulses = d32;
            }
            "phase_a_deg" => cfg.phase_a_deg = parse_f64(key, value, line)?,
            "phase_b_deg" => cfg.phase_b_deg = parse_f64(key, value, line)?,
            other => {
                return Err(err(
                    line,
                    format!("unknown key `{other}` (expected one of: {})", KEYS.join(", ")),
                ));
            }
        }
    }
    Ok(cfg)
}

/// Serialize a configuration to the text format. Numbers use the shortest
/// representation that parses back to the identical value, so
/// `parse_config(to_text(c)) == c` for any parsable configuration.
pub fn to_text(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    match cfg.alpha_mag {
        Some(mag) => out.push_str(&format!("alpha = {mag}\n")),
        None => out.push_str("# alpha defaults to the pair-matched amplitude\nalpha = matched\n"),
    }
    out.push_str(&format!("xi = {}\n", cfg.xi));
    out.push_str(&format!("phase_deg = {}\n", cfg.phase_deg));
    out.push_str(&format!("overlap = {}\n", cfg.overlap));
    out.push_str(&format!("efficiency = {}\n", cfg.efficiency));
    out.push_str(&format!("dark_prob = {}\n", cfg.dark_prob));
    out.push_str(&format!("rep_rate_hz = {}\n", cfg.rep_rate_hz));
    out.push_str(&format!("n_pulses = {}\n", cfg.n_pulses));
    out.push_str(&format!("seed = {}\n", cfg.seed));
    out.push_str(&format!("scenario = {}\n", cfg.scenario));
    out.push_str(&format!("mode = {}\n", cfg.mode));
    out.push_str(&format!("bin_width_ns = {}\n", cfg.bin_width_ns));
    out.push_str(&format!("window_ns = {}\n", cfg.window_ns));
    out.push_str(&format!("delay_pulses = {}\n", cfg.delay_pulses));
    out.push_str(&format!("phase_a_deg = {}\n", cfg.phase_a_deg));
    out.push_str(&format!("phase_b_deg = {}\n", cfg.phase_b_deg));
    out
}
