//! Table emission.
//!
//! CSV and JSON carry the same rows with the same field names, so the two
//! formats are interchangeable downstream.  Numbers are printed in the
//! shortest round-trip form, which keeps output byte-deterministic without
//! baking in a precision choice.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, Scenario};
use crate::error::{config, CliError};

/// Where a table goes: an explicit `--out`, the scenario's `[output]` table,
/// or stdout.
pub fn resolve_destination(
    scenario: &Scenario,
    out_flag: Option<PathBuf>,
    format_flag: Option<Format>,
) -> (Option<PathBuf>, Format) {
    let path = out_flag.or_else(|| scenario.output.as_ref().map(|(p, _)| p.clone()));
    let format = format_flag
        .or(scenario.output.as_ref().map(|&(_, f)| f))
        .unwrap_or(Format::Csv);
    (path, format)
}

/// Serializes rows to the destination; `None` writes to stdout.
pub fn write_rows<R: Serialize>(
    rows: &[R],
    path: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let bytes = render(rows, format)?;
    write_bytes(&bytes, path)
}

/// Renders rows to their on-disk byte form.
pub fn render<R: Serialize>(rows: &[R], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)
                    .map_err(|e| CliError::Numeric(format!("csv serialization: {e}")))?;
            }
            w.into_inner()
                .map_err(|e| CliError::Numeric(format!("csv serialization: {e}")))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows)
                .map_err(|e| CliError::Numeric(format!("json serialization: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

pub fn write_bytes(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| config("output", format!("stdout: {e}"))),
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| config("output.path", format!("{}: {e}", parent.display())))?;
                }
            }
            std::fs::write(p, bytes).map_err(|e| config("output.path", format!("{}: {e}", p.display())))
        }
    }
}
