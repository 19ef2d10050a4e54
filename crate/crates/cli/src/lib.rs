//! Command implementations for the `hilreg` benchmark binary.
//!
//! Each subcommand lives in its own module and returns [`CliError`], whose
//! `exit_code` fixes the process exit contract: 0 success, 1 property
//! violation, 2 configuration error, 3 numerical failure.

use std::path::Path;

pub mod config;
pub mod error;
pub mod rates;
pub mod runs;
pub mod solve;
pub mod tables;
pub mod verify;

pub use error::CliError;

/// Writes `text` to `path`, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let wrap = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(wrap)?;
        }
    }
    std::fs::write(path, text).map_err(wrap)
}
