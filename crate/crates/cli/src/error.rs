use thiserror::Error;

/// Failures of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments: exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Numerical or verification failure: exit code 1.
    #[error("{0}")]
    Numeric(String),
    #[error("cannot parse table: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) | CliError::Parse(_) => 1,
        }
    }
}

impl From<hft::Error> for CliError {
    fn from(e: hft::Error) -> Self {
        use hft::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::UnknownModel(_)
            | E::OutOfDomain { .. }
            | E::FillingOutOfRange { .. }
            | E::NoSymmetry(_)
            | E::BadStep(_)
            | E::SameIndex(_)
            | E::IndexOutOfRange { .. }
            | E::Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
