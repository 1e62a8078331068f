use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched coefficient rings: {0}")]
    RingMismatch(String),
    #[error("unsupported field or ring: {0}")]
    Unsupported(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("cover is not totally ramified: {0}")]
    NonTotallyRamified(String),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("Hasse-Arf violation: {0}")]
    HasseArf(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("ghost inversion failed: {0}")]
    GhostInversion(String),
    #[error("local symbol should vanish but does not: {0}")]
    Vanishing(String),
    #[error("integrality failure while building Witt tables: {0}")]
    Integrality(String),
    #[error("infeasible lattice problem")]
    Infeasible,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in structured CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division_by_zero",
            Error::RingMismatch(_) => "ring_mismatch",
            Error::Unsupported(_) => "unsupported",
            Error::InsufficientPrecision(_) => "insufficient_precision",
            Error::InvalidComposition(_) => "invalid_composition",
            Error::NoRoot(_) => "no_root",
            Error::NonTotallyRamified(_) => "non_totally_ramified",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::HasseArf(_) => "hasse_arf_violation",
            Error::Consistency(_) => "consistency_failure",
            Error::GhostInversion(_) => "ghost_inversion_failure",
            Error::Vanishing(_) => "vanishing_failure",
            Error::Integrality(_) => "integrality_failure",
            Error::Infeasible => "infeasible",
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
        }
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
