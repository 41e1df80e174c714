use thiserror::Error;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NUMERIC: i32 = 65;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A computation ended in a status (an infinite value, an improper price).
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<gooddeal_core::Error> for CliError {
    fn from(e: gooddeal_core::Error) -> Self {
        use gooddeal_core::Error as E;
        match e {
            E::DimensionMismatch { .. } | E::NonFinite(_) | E::InvalidInput(_) => CliError::Usage(e.to_string()),
            E::NoSignChange { .. } | E::IterationLimit(_) => CliError::Numeric(e.to_string()),
        }
    }
}
