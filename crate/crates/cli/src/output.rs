//! CSV tables and their JSON sidecars.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(&'static str),
}

impl Cell {
    /// Integers verbatim, floats in scientific notation with 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => (*s).to_string(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

/// Column names with their meaning, plus rows in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<(&'static str, &'static str)>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|(c, _)| *c).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a run produces before it touches the filesystem.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    /// Extra JSON documents written as `{output}.{suffix}.json`.
    pub sidecars: Vec<(&'static str, Value)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn with_suffix(base: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{base}{suffix}"))
}

/// Paths written by [`write_run`].
#[derive(Debug, Clone)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub sidecars: Vec<PathBuf>,
}

pub fn write_run(config: &ExperimentConfig, run: &RunOutput, wall_time: f64, threads: usize) -> Result<WrittenFiles> {
    let base = config.output.as_str();
    if let Some(dir) = Path::new(base).parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let csv = run.table.to_csv();
    let csv_path = with_suffix(base, ".csv");
    std::fs::write(&csv_path, &csv)?;

    let mut sidecars = Vec::new();
    for (suffix, doc) in &run.sidecars {
        let path = with_suffix(base, &format!(".{suffix}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(doc).expect("sidecar serializes") + "\n")?;
        sidecars.push(path);
    }

    let config_json = serde_json::to_value(config).expect("config serializes");
    let columns: Map<String, Value> =
        run.table.columns.iter().map(|(c, m)| ((*c).to_string(), Value::from(*m))).collect();
    let file_name = |p: &Path| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let meta = json!({
        "experiment": config.experiment.map(|e| e.name()),
        "library_version": gegenkrr::VERSION,
        "master_seed": config.seed,
        "config": config_json,
        "config_sha256": sha256_hex(serde_json::to_string(&config_json).expect("config serializes").as_bytes()),
        "csv": { "file": file_name(&csv_path), "sha256": sha256_hex(csv.as_bytes()), "rows": run.table.rows.len() },
        "columns": columns,
        "sidecars": sidecars.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
        "wall_time_seconds": wall_time,
        "threads": threads,
    });
    let meta_path = with_suffix(base, ".meta.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n")?;
    Ok(WrittenFiles { csv: csv_path, meta: meta_path, sidecars })
}
