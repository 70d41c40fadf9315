//! Deterministic artifact emission: CSV tables with full-precision decimal
//! cells and a summary JSON with per-assertion outcomes. All writes go
//! through one writer in row order, so byte-identical configs give
//! byte-identical files regardless of thread count.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Assertion {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

pub struct RunArtifacts {
    pub tables: Vec<CsvTable>,
    pub assertions: Vec<Assertion>,
    /// extra subcommand-specific summary entries
    pub extra: Value,
}

impl RunArtifacts {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

pub fn config_sha256(raw: &str) -> String {
    let mut h = Sha256::new();
    h.update(raw.as_bytes());
    format!("{:x}", h.finalize())
}

pub fn write_artifacts(
    out_dir: &Path,
    subcommand: &str,
    config_hash: &str,
    precision_bits: u32,
    wall_ms: u128,
    artifacts: &RunArtifacts,
) -> std::io::Result<()> {
    fs::create_dir_all(out_dir)?;
    for table in &artifacts.tables {
        let path = out_dir.join(format!("{}.csv", table.name));
        fs::write(&path, table.render())?;
    }
    let summary = json!({
        "subcommand": subcommand,
        "config_sha256": config_hash,
        "precision_bits": precision_bits,
        "wall_ms": wall_ms,
        "passed": artifacts.passed(),
        "assertions": artifacts.assertions.iter().map(|a| json!({
            "name": a.name,
            "passed": a.passed,
            "detail": a.detail,
        })).collect::<Vec<_>>(),
        "extra": artifacts.extra,
    });
    let path = out_dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary).unwrap())?;
    Ok(())
}
