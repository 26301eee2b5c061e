use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// One CSV result row. Empty cells mean "not applicable".
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub command: &'static str,
    pub seed: u64,
    pub n: usize,
    pub area_exact_or_mc: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub status: String,
    pub samples_used: u64,
    pub wall_ms: u64,
}

pub fn write_rows(rows: &[Row], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
