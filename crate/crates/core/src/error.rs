use thiserror::Error;

/// Unified error type for state construction, apparatus operations and I/O.
#[derive(Error, Debug)]
pub enum SimError {
    #[error("mode `{0}` not present in state")]
    UnknownMode(String),

    #[error("mode `{0}` already present in state")]
    DuplicateMode(String),

    #[error("state holds {count} modes; cap is {cap}")]
    TooManyModes { count: usize, cap: usize },

    #[error("truncation {given} outside supported range 1..={max}")]
    BadTruncation { given: u32, max: u32 },

    #[error("occupation {occ} exceeds truncation {truncation}")]
    OccupationOverflow { occ: u32, truncation: u32 },

    #[error("probability mass {mass:.3e} clipped by truncation exceeds tolerance {tol:.1e}; raise the photon-number cutoff")]
    TruncationOverflow { mass: f64, tol: f64 },

    #[error("parameter `{name}` = {value} outside valid range {range}")]
    BadParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("cannot operate on zero state (no amplitude left)")]
    ZeroState,

    #[error("mode `{0}` has indefinite occupation; measure or project it first")]
    IndefiniteOccupation(String),

    #[error("histograms have different bin geometry; cannot merge")]
    HistogramMismatch,

    #[error("bin width {bin_width} ns does not evenly tile the window ±{window} ns")]
    BadBinning { bin_width: f64, window: f64 },

    #[error("coherent amplitude |α|²={mean_n:.3} leaves tail mass {tail:.3e} above truncation {truncation}; raise the cutoff")]
    CoherentTail {
        mean_n: f64,
        truncation: u32,
        tail: f64,
    },

    #[error("interferometer delay must satisfy 1 <= delay_pulses < n_pulses (got delay {delay}, train {n_pulses})")]
    BadDelay { delay: u32, n_pulses: u64 },

    #[error("exact computation assumes identical pulses; set locked_phase_jitter to zero or use Monte Carlo")]
    JitterUnsupported,

    #[error("scenario `{0}` is driven by a dedicated entry point: {1}")]
    WrongEntryPoint(&'static str, &'static str),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
