use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: amplitudes have zero norm")]
    DegenerateState,
    #[error("non-finite amplitude or component: {0}")]
    NonFinite(String),
    #[error("direction is not a unit vector (|v|^2 = {norm_sq})")]
    NotUnit { norm_sq: f64 },
    #[error("directions are collinear (|b.b'| = {dot}); the relation can hold")]
    Collinear { dot: f64 },
    #[error("value {value} for `{name}` outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("n_points must be at least 2 (got {0})")]
    TooFewPoints(usize),
    #[error("unknown configuration label `{0}` (expected A, B or C)")]
    UnknownConfig(String),
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
