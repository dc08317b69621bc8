//! Files, command line and multi-threaded sweeps for `mobsim-core`.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod records;
pub mod render;
pub mod summary;
pub mod sweep;
pub mod world_file;

pub use error::{Error, Result};
pub use mobsim_core;
