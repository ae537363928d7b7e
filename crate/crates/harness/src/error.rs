use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("{0} is empty")]
    EmptyInput(String),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] seiguard_core::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
