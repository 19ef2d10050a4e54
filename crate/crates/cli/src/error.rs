//! Command-level errors and their process exit codes.
//!
//! The exit code contract: 0 success, 1 property violation, 2 configuration
//! error, 3 numerical failure. `clap` already exits with 2 on bad flags, so
//! file-based config problems map to the same code.

use std::fmt;
use std::path::PathBuf;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io { path: PathBuf, source: std::io::Error },
    Numerical(hilreg::Error),
    /// A noise-ladder study had to stop early; the string says why.
    Study(String),
    /// `verify` found this many property violations.
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violations(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) | CliError::Study(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io { path, source } => {
                write!(f, "i/o error on {}: {source}", path.display())
            }
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Study(reason) => write!(f, "study aborted: {reason}"),
            CliError::Violations(n) => write!(f, "{n} property violation(s)"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<hilreg::Error> for CliError {
    fn from(e: hilreg::Error) -> Self {
        CliError::Numerical(e)
    }
}
