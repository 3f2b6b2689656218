//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Signal shorter than one analysis window. `channel` is set when the
    /// failure happened inside a multi-channel stack.
    #[error("signal too short: {got} samples, need at least {needed}{}",
            channel.map(|c| format!(" (channel {c})")).unwrap_or_default())]
    SignalTooShort {
        needed: usize,
        got: usize,
        channel: Option<usize>,
    },

    #[error("no frequency bins fall inside the band [{f_lo} Hz, {f_hi} Hz]")]
    EmptyBand { f_lo: f64, f_hi: f64 },

    #[error("degenerate interpolation source: {0}")]
    DegenerateSource(String),

    #[error("recording too short: {len_s} s, need at least {needed_s} s")]
    RecordingTooShort { len_s: f64, needed_s: f64 },

    #[error("malformed WAV at byte {offset}: {message}")]
    WavParse { offset: u64, message: String },

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),

    #[error("{path}:{line}: {message}")]
    CsvSchema {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("bad magic in tensor file: expected \"SST1\", found {found:?}")]
    TensorMagicMismatch { found: [u8; 4] },

    #[error("unsupported tensor dtype code {code} (only 0 = f32 LE is defined)")]
    TensorDtypeMismatch { code: u8 },

    #[error("tensor payload length mismatch: header implies {expected} bytes, file holds {actual}")]
    TensorLengthMismatch { expected: usize, actual: usize },

    #[error("unknown class label {0:?}")]
    UnknownLabel(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
