use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] multiconn::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0} self-test check(s) failed")]
    SelftestFailed(usize),
}

impl CliError {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use multiconn::Error as E;
        match self {
            CliError::Invalid { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::SelftestFailed(_) => EXIT_NUMERIC,
            CliError::Core(e) => match e {
                E::Io { .. } => EXIT_IO,
                E::ToleranceNotAchieved { .. }
                | E::NoConvergence { .. }
                | E::Bracket { .. }
                | E::DegenerateSpacing(_) => EXIT_NUMERIC,
                _ => EXIT_VALIDATION,
            },
        }
    }
}
