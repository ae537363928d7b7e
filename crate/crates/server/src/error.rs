use thiserror::Error;

pub const USERNAME_EXISTS: &str = "the username has existed";
pub const LOGIN_FAILED: &str = "the username or password is wrong";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{}", USERNAME_EXISTS)]
    UsernameTaken,
    /// Unknown username (both services) or wrong password (baseline only).
    #[error("{}", LOGIN_FAILED)]
    BadCredentials,
    #[error("{0}")]
    Invalid(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(seiguard_core::Error),
    #[error("database: {0}")]
    Db(#[from] rusqlite::Error),
    #[error("password hashing: {0}")]
    Hash(#[from] bcrypt::BcryptError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker task failed")]
    Join,
}

impl From<seiguard_core::Error> for ServiceError {
    fn from(e: seiguard_core::Error) -> Self {
        use seiguard_core::Error as E;
        match e {
            E::InvalidMessage(m) => ServiceError::Invalid(m),
            E::EmptyPassword => ServiceError::Invalid("the password must not be empty".into()),
            other => ServiceError::Core(other),
        }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
