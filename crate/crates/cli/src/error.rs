use ilac_core::IlacError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(IlacError),

    #[error("validation failed: {}", .0.join(", "))]
    Validation(Vec<String>),
}

impl From<IlacError> for CliError {
    fn from(e: IlacError) -> Self {
        match e {
            IlacError::Config { key, reason } => CliError::Config {
                key: key.to_owned(),
                reason,
            },
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            _ => 2,
        }
    }
}
