//! CSV and manifest writers.
//!
//! Numbers are written with 17 significant digits so every value
//! round-trips exactly.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `prefix` joined with `name` by plain concatenation, so a prefix may name a
/// directory (`out/`) or a file stem (`out/run1_`).
pub fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })
        }
        _ => Ok(()),
    }
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    Ok(())
}

/// Writes `body` after a comment header naming the code version and command.
pub fn write_manifest(path: &Path, command: &str, body: &str) -> Result<(), CliError> {
    ensure_parent(path)?;
    let text = format!(
        "# photon-echo {}\n# command: {command}\n# Rerun with --config on this file to reproduce the outputs.\n\n{body}",
        env!("CARGO_PKG_VERSION")
    );
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}
