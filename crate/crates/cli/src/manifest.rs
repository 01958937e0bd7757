use std::fs;
use std::path::{Path, PathBuf};

use harmonic_newton::harmonic_map::FunctionSpec;
use harmonic_newton::search::GridSpec;
use harmonic_newton::StoppingConfig;
use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::Failure;

/// Everything needed to redo a run, written as JSON next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    /// Resolved function, independent of any file it was read from.
    pub function: FunctionSpec,
    pub grid: Option<GridSpec>,
    pub stopping: Option<StoppingConfig>,
    pub outputs: Vec<PathBuf>,
    pub palette_seed: Option<u64>,
    /// The command line as parsed.
    pub command: Command,
}

impl RunManifest {
    pub fn new(command: &Command, function: FunctionSpec) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: command.name().to_string(),
            function,
            grid: None,
            stopping: None,
            outputs: Vec::new(),
            palette_seed: None,
            command: command.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

/// `out/basins.png` → `out/basins.manifest.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Basins(_) => "basins",
            Command::Phaseplot(_) => "phaseplot",
            Command::Seeds(_) => "seeds",
            Command::Certify(_) => "certify",
            Command::Laurent(_) => "laurent",
            Command::Sweep(_) => "sweep",
            Command::Replay(_) => "replay",
        }
    }
}
