use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate Fresnel geometry: transmitter and receiver coincide")]
    DegenerateGeometry,

    #[error("motion events overlap: [{a_start}, {a_end}) and [{b_start}, {b_end})")]
    OverlappingEvents {
        a_start: f64,
        a_end: f64,
        b_start: f64,
        b_end: f64,
    },

    #[error("sample rate {sample_rate} Hz aliases heartbeat at {heart_freq} Hz")]
    Aliasing { sample_rate: f64, heart_freq: f64 },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("index out of range: {what} {index} (have {len})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid band {low_hz}-{high_hz} Hz at sample rate {sample_rate} Hz")]
    InvalidBand {
        low_hz: f64,
        high_hz: f64,
        sample_rate: f64,
    },

    #[error("bad magic {0:?}, expected \"WITL\"")]
    BadMagic([u8; 4]),

    #[error("unsupported trace format version {0}")]
    UnsupportedVersion(u8),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("trace shape overflows: {0}")]
    ShapeOverflow(String),

    #[error("schema violation at `{path}`: {reason}")]
    Schema { path: String, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("report and ground truth have disjoint time supports")]
    DisjointSupport,

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
