//! CSV and JSON writers. Numbers are printed with 17 significant digits so a
//! re-read recovers every bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub config_hash: String,
    pub command: String,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Row-major entries of a matrix.
pub fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    m.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()).collect()
}

/// Column names `{prefix}_{i}{j}` for a row-major matrix.
pub fn matrix_columns(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(format!("{prefix}_{i}{j}"));
        }
    }
    out
}

pub fn vector_columns(prefix: &str, len: usize) -> Vec<String> {
    (0..len).map(|i| format!("{prefix}_{i}")).collect()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(meta: &Meta, header: &[String]) -> Self {
        let mut text = String::new();
        writeln!(text, "# seed={}, config_hash={}", meta.seed, meta.config_hash).unwrap();
        writeln!(text, "{}", header.join(",")).unwrap();
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        writeln!(self.text, "{}", fields.join(",")).unwrap();
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, &self.text)?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("summary serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn prepare_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}
