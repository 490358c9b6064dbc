//! CSV products: `#` metadata lines, a header row, numbers in scientific
//! notation with nine significant digits. Files are written to a temporary
//! sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const TOOL: &str = concat!("lgtorsion ", env!("CARGO_PKG_VERSION"));

/// Nine significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

/// Error text made safe for a single CSV field.
pub fn error_field(e: &dyn std::fmt::Display) -> String {
    e.to_string().replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, command: &str, scenario_hash: &str) -> Result<Vec<u8>, csv::Error> {
        let mut buf = Vec::new();
        writeln!(buf, "# tool: {TOOL}")?;
        writeln!(buf, "# command: {command}")?;
        writeln!(buf, "# scenario_sha256: {scenario_hash}")?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Writes `table` to `dir/name` atomically and returns the final path.
pub fn write_table(dir: &Path, name: &str, table: &Table, command: &str, scenario_hash: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let bytes = table
        .render(command, scenario_hash)
        .map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(&bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}
