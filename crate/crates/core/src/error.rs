use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root finder did not converge (best residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("map is affine or constant after removing the identity (degree {degree})")]
    DegenerateMap { degree: usize },

    #[error("fixed-points polynomial has {pairs} complex conjugate pair(s)")]
    ComplexFixedPoints { pairs: usize },

    #[error("anchor index {index} out of range for {count} fixed points")]
    BadAnchor { index: usize, count: usize },

    #[error("index {index} out of range (valid 0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("orbit does not close (gap {gap:e})")]
    NotACycle { gap: f64 },

    #[error("no built-in band table for degree {degree}")]
    UnsupportedDegree { degree: usize },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("expression {index} poisoned at lambda = {lambda}: {reason}")]
    PoisonedExpression { lambda: f64, index: usize, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("tail of length {len} too short for p_max = {p_max}")]
    TailTooShort { len: usize, p_max: usize },

    #[error("invalid bracket: {0}")]
    BracketInvalid(String),

    #[error("bracket reached the detection noise floor; best estimate {value} +/- {half_width:e}")]
    NoiseFloor { value: f64, half_width: f64 },

    #[error("consecutive values {index} and {} coincide", index + 1)]
    DegenerateGap { index: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::Invalid(e.to_string())
        }
    }
}

impl Error {
    /// Process exit code: 2 input, 3 I/O, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::NonConvergence { .. }
            | Error::NoiseFloor { .. }
            | Error::NotACycle { .. }
            | Error::TailTooShort { .. }
            | Error::DegenerateGap { .. }
            | Error::BracketInvalid(_) => 4,
            _ => 2,
        }
    }
}
