use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Parse(String),
    #[error("config: {field}: {msg}")]
    Config { field: String, msg: String },
    #[error("{0}")]
    Numerical(qflqg_core::Error),
    #[error("{0}")]
    Oracle(qflqg_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

impl From<qflqg_core::Error> for CliError {
    fn from(e: qflqg_core::Error) -> Self {
        match e {
            qflqg_core::Error::TooLarge { .. } => CliError::Oracle(e),
            e => CliError::Numerical(e),
        }
    }
}
