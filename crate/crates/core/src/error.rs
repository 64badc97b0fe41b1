use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// A NaN or infinity appeared; `step` names the fractional step.
    #[error("non-finite value produced in {step} at outer iteration {iteration}")]
    NonFinite {
        step: &'static str,
        iteration: usize,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

impl Error {
    /// Process exit status for the command-line tool: 2 for bad
    /// parameters, 3 for I/O, format and shape problems, 4 for numerical
    /// breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::DimensionMismatch { .. } | Error::Format(_) | Error::Io(_) => 3,
            Error::NonFinite { .. } => 4,
        }
    }
}
