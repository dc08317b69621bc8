use std::io;
use std::path::{Path, PathBuf};

use mobsim_core::WorldError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Placement(WorldError),
}

impl Error {
    /// 1 for usage errors, 2 for bad or missing data, 3 when world
    /// generation runs out of room.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            Error::Io { .. } | Error::Data(_) => 2,
            Error::Placement(_) => 3,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<WorldError> for Error {
    fn from(e: WorldError) -> Self {
        match e {
            WorldError::PlacementExhausted { .. } => Error::Placement(e),
            other => Error::Data(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
