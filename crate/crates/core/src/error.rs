use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A parameter combination the closed forms do not cover.
    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} after {subdivisions} subdivisions")]
    Accuracy {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// Configuration failed validation; `key` is the dotted path of the offending entry.
    #[error("invalid configuration at `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            detail: detail.into(),
        }
    }

    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::Accuracy { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Parse(_) | Error::Unsupported(_) | Error::Domain { .. }
        )
    }
}
