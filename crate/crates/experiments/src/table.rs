//! Named-column result tables with a manifest echo; the CSV bytes are a
//! stable, regenerable artifact.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::ExpError;
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// One experiment's output: aligned columns plus a metadata echo sufficient
/// to regenerate the table bit-identically (spec + seed; wall time is
/// informational only).
#[derive(Clone, Debug, Serialize)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub metadata: serde_json::Value,
}

impl ResultTable {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<Column>,
        metadata: serde_json::Value,
    ) -> Result<Self> {
        let name = name.into();
        if let Some(first) = columns.first() {
            for c in &columns {
                if c.values.len() != first.values.len() {
                    return Err(ExpError::Internal(format!(
                        "column {} has {} rows, expected {}",
                        c.name,
                        c.values.len(),
                        first.values.len()
                    )));
                }
            }
        }
        Ok(Self {
            name,
            columns,
            metadata,
        })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Headered CSV; shortest-roundtrip float formatting keeps the bytes
    /// deterministic and exact.
    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.extend_from_slice(header.join(",").as_bytes());
        out.push(b'\n');
        let rows = self.columns.first().map_or(0, |c| c.values.len());
        for i in 0..rows {
            let row: Vec<String> = self
                .columns
                .iter()
                .map(|c| format!("{}", c.values[i]))
                .collect();
            out.extend_from_slice(row.join(",").as_bytes());
            out.push(b'\n');
        }
        out
    }

    /// Writes `<dir>/<name>/table.csv` and `<dir>/<name>/manifest.json`,
    /// returning the run directory.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let run_dir = dir.join(&self.name);
        fs::create_dir_all(&run_dir)?;
        let mut f = BufWriter::new(fs::File::create(run_dir.join("table.csv"))?);
        f.write_all(&self.csv_bytes())?;
        f.flush()?;
        fs::write(
            run_dir.join("manifest.json"),
            serde_json::to_string_pretty(&self.metadata).expect("metadata serializes"),
        )?;
        Ok(run_dir)
    }
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
