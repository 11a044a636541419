use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Effort argument outside `a ≥ 0`.
    #[error("effort {0} is outside the domain a >= 0")]
    Domain(f64),

    /// A target value the function cannot attain. `lo`/`hi` describe the
    /// attainable interval; `lo_open` marks an open lower end.
    #[error("value {value} is outside the attainable interval {}{lo}, {hi}]", if *.lo_open { "(" } else { "[" })]
    Range {
        value: f64,
        lo: f64,
        hi: f64,
        lo_open: bool,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("sensor index {index} out of range for {n} sensors")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("a contract game needs at least two sensors, got {0}")]
    TooFewSensors(usize),

    #[error("cost function is bounded above; an equilibrium is not guaranteed")]
    ExistenceViolation,

    #[error("no sign change of the best-response slope below a = {0}")]
    BracketExceeded(f64),

    #[error("convexity condition fails at a = {0}")]
    ConvexityViolation(f64),

    #[error("equilibrium is not interior; sensitivity is undefined")]
    NotInterior,

    #[error("operation requires a symmetric contract game")]
    NotSymmetric,

    #[error("symmetric game produced unequal efforts ({0} vs {1})")]
    SymmetryBroken(f64, f64),
}

impl Error {
    pub(crate) fn range(value: f64, lo: f64, hi: f64, lo_open: bool) -> Self {
        Error::Range {
            value,
            lo,
            hi,
            lo_open,
        }
    }
}
