use std::path::PathBuf;

use geodc_core::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] geodc_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("placement refers to unknown site {0}")]
    UnknownPlacementSite(usize),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) => match e.kind() {
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Infeasible => EXIT_INFEASIBLE,
                ErrorKind::TooLarge => EXIT_TOO_LARGE,
                ErrorKind::Internal => EXIT_INTERNAL,
            },
            Error::Io { .. } | Error::Parse { .. } | Error::UnknownPlacementSite(_) | Error::Invalid(_) => {
                EXIT_VALIDATION
            }
        }
    }
}
