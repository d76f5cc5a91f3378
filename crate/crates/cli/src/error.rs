use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid model: {0}")]
    Model(duopoly_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Model(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<duopoly_core::Error> for CliError {
    fn from(e: duopoly_core::Error) -> Self {
        if e.is_invalid_model() {
            CliError::Model(e)
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
