//! Experiment reports (`report.json`) and CSV table writers.
//!
//! Reports carry the resolved config, the tolerances in force, and one
//! provenance entry per operation call behind every reported number. All maps
//! are ordered so serialization is byte-stable for the determinism contract.

use crate::config::ExperimentConfig;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const ARTIFACT_NAME: &str = "translab";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub artifact: ArtifactInfo,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub provenance: Vec<ProvenanceEntry>,
    pub metrics: BTreeMap<String, serde_json::Value>,
    pub tables: BTreeMap<String, Vec<serde_json::Value>>,
}

#[derive(Debug, Serialize)]
pub struct ArtifactInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ProvenanceEntry {
    pub op: String,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64, config: &ExperimentConfig) -> Self {
        ExperimentReport {
            artifact: ArtifactInfo { name: ARTIFACT_NAME, version: ARTIFACT_VERSION },
            command: command.to_string(),
            seed,
            config: config.clone(),
            tolerances: BTreeMap::new(),
            provenance: Vec::new(),
            metrics: BTreeMap::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    pub fn record_op(&mut self, op: &str, params: &[(&str, serde_json::Value)]) {
        self.provenance.push(ProvenanceEntry {
            op: op.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        });
    }

    pub fn metric(&mut self, name: &str, value: impl Serialize) {
        self.metrics.insert(
            name.to_string(),
            serde_json::to_value(value).expect("metric serialization"),
        );
    }

    pub fn table_row(&mut self, table: &str, row: impl Serialize) {
        self.tables
            .entry(table.to_string())
            .or_default()
            .push(serde_json::to_value(row).expect("row serialization"));
    }

    pub fn write(&self, out_dir: &Path) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join("report.json");
        let mut file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut file, self)?;
        file.write_all(b"\n")?;
        Ok(path)
    }
}

/// Write a CSV with the given header line and preformatted rows.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &str,
    rows: &[String],
) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(path)
}

/// Shortest-roundtrip float formatting (deterministic across runs).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Machine-readable error record for nonzero exits.
pub fn error_record(kind: &str, message: &str) -> String {
    serde_json::json!({
        "error": { "kind": kind, "message": message }
    })
    .to_string()
}
