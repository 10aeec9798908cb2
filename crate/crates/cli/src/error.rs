use thiserror::Error;

/// Failures surfaced by the command line, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parameter(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Acceptance(_) => 5,
        }
    }
}

impl From<bergman_dbar::Error> for CliError {
    fn from(e: bergman_dbar::Error) -> Self {
        use bergman_dbar::Error as E;
        match e {
            E::ParameterDomain(_) | E::Domain(_) => CliError::Parameter(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
