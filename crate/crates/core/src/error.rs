use thiserror::Error;

use crate::tda::BettiCurves;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: {what} = {got} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("order violation: {0}")]
    Order(String),
    #[error("not a member of the family: {0}")]
    Membership(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported cumulant kind for this operation: {0}")]
    UnsupportedKind(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("sample {value} is outside the bin range [{lo}, {hi}]")]
    Coverage { value: f64, lo: f64, hi: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Betti curves stopped at t = {t}: {cause}")]
    PartialCurves {
        t: f64,
        completed: Box<BettiCurves>,
        cause: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn size(what: &'static str, limit: usize, got: usize) -> Self {
        Error::SizeLimit { what, limit, got }
    }

    /// The innermost cause, looking through partial-result wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::PartialCurves { cause, .. } => cause.root_cause(),
            other => other,
        }
    }
}
