//! Library side of the `sma` command-line tool: configuration, the
//! subcommands, CSV output and the numbered reproduction checks.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::path::{Path, PathBuf};

pub use commands::{run, Report};
pub use config::{Command, ExperimentConfig};
pub use error::{CliError, CliResult};

/// Environment variable naming the output directory.
pub const OUTPUT_ENV: &str = "SMA_OUTPUT_DIR";

/// `output` from the config, else the environment, else the working
/// directory.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    if !cfg.output.is_empty() {
        return PathBuf::from(&cfg.output);
    }
    std::env::var_os(OUTPUT_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

/// Writes every table of `report` as `{prefix}_{name}.csv` under `dir`.
pub fn write_report(report: &Report, prefix: &str, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::new();
    for t in &report.tables {
        let path = dir.join(format!("{prefix}_{}.csv", t.name));
        table::emit_csv(t, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    CheckFailed = 1,
    Error = 2,
}
