//! CSV tables and the JSON sidecar record.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::CliError;

pub const BUILD_ID: &str = match option_env!("WINDING_BUILD_ID") {
    Some(id) => id,
    None => concat!("winding-cli-", env!("CARGO_PKG_VERSION")),
};

/// Sidecar written next to every CSV output.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub config: Settings,
    pub git_or_build_id: String,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    pub summary: serde_json::Value,
    pub notes: Vec<String>,
}

/// In-memory CSV table with a fixed header.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(io_err)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(cells).map_err(io_err)
    }

    pub fn into_bytes(self) -> Result<Vec<u8>, CliError> {
        self.writer.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Io(e.to_string())
}

/// Shortest round-trip form, in exponent notation for very large or small
/// magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the table to `out` (stdout if `None`) and the record beside it
/// (stderr if `None`).
pub fn emit(out: Option<&Path>, csv: &[u8], mut record: ExperimentRecord) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let side = sidecar_path(path);
            record.outputs = vec![path.display().to_string(), side.display().to_string()];
            fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let json = serde_json::to_string_pretty(&record).map_err(io_err)?;
            fs::write(&side, json + "\n")
                .map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
        }
        None => {
            record.outputs = vec!["-".into()];
            std::io::stdout().write_all(csv).map_err(io_err)?;
            let json = serde_json::to_string(&record).map_err(io_err)?;
            eprintln!("{json}");
        }
    }
    Ok(())
}
