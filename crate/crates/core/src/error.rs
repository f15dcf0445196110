use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or argument. `field` is a dotted path when the
    /// value came from a scenario file.
    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    /// A pair came closer than the minimum-distance guard.
    #[error("singular pair distance {distance:e} between particles {i} and {j} at step {step}")]
    SingularPair {
        i: usize,
        j: usize,
        distance: f64,
        step: u64,
    },

    #[error("non-finite state at step {step}")]
    NonFinite { step: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse(_) => 2,
            Error::SingularPair { .. } | Error::NonFinite { .. } => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
