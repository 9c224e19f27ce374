//! Command implementations behind the `gtele` binary.
//!
//! Every number in a report comes straight from the `gauss_teleport` engine;
//! this crate only parses arguments and serializes results.

pub mod commands;
pub mod format;
pub mod report;
pub mod scenario;

pub use commands::{cmd_check, cmd_mc, cmd_sweep, cmd_teleport, sweep_rows, write_sweep, SweepRow};
pub use scenario::{ScenarioArgs, ScenarioConfig};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Engine(#[from] gauss_teleport::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Engine(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    /// JSON body printed on stdout for engine failures.
    pub fn to_json(&self) -> serde_json::Value {
        let name = match self {
            CliError::Parse(_) => "ParseError",
            CliError::Engine(e) => e.name(),
            CliError::Io { .. } => "IoError",
        };
        serde_json::json!({ "error": name, "message": self.to_string() })
    }
}
