// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON emission. Floats are written with 17 significant digits so
//! that every value round-trips exactly; missing values are empty fields.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes a header and rows to `dir/name`, returning the path.
pub fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let err = |e: csv::Error| CliError::io(&path, e.into());
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, to_json(value) + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
