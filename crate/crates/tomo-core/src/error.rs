use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested object is too large for the exhaustive routines.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Path enumeration emitted more paths than the configured budget allows.
    #[error("path budget of {budget} exceeded after {emitted} paths")]
    BudgetExceeded { budget: usize, emitted: usize },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<u32>, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

macro_rules! ensure_domain {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Domain(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure_domain;
