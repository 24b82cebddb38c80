//! Deterministic artifact writing. Every output embeds the tool version,
//! the instance content hash, the full parameter set, and the seed, so a
//! rerun with identical flags is byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{AppError, AppResult};

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: String,
    pub instance_hash: String,
    pub seed: u64,
    pub params: Value,
}

impl Meta {
    pub fn new(command: &str, instance_hash: &str, seed: u64, params: Value) -> Self {
        Meta {
            version: maxklin_core::VERSION,
            command: command.to_string(),
            instance_hash: instance_hash.to_string(),
            seed,
            params,
        }
    }

    /// Single-line `# key=value ...` comment header for CSV artifacts.
    pub fn csv_header(&self) -> String {
        let mut line = format!(
            "# version={} command={} instance_hash={} seed={}",
            self.version, self.command, self.instance_hash, self.seed
        );
        if let Value::Object(map) = &self.params {
            for (k, v) in map {
                let _ = write!(line, " {k}={v}");
            }
        }
        line
    }
}

/// JSON artifact: {"meta": ..., "data": ...}, pretty-printed with a trailing
/// newline.
pub fn write_json<T: Serialize>(path: &Path, meta: &Meta, data: &T) -> AppResult<()> {
    let mut root = Map::new();
    root.insert(
        "meta".into(),
        serde_json::to_value(meta).map_err(|e| AppError::internal(e.to_string()))?,
    );
    root.insert(
        "data".into(),
        serde_json::to_value(data).map_err(|e| AppError::internal(e.to_string()))?,
    );
    let body = serde_json::to_string_pretty(&Value::Object(root))
        .map_err(|e| AppError::internal(e.to_string()))?;
    std::fs::write(path, body + "\n")
        .map_err(|e| AppError::internal(format!("write {}: {e}", path.display())))
}

/// CSV artifact: meta comment, header row, data rows.
pub fn write_csv(path: &Path, meta: &Meta, header: &str, rows: &[String]) -> AppResult<()> {
    let mut body = String::new();
    body.push_str(&meta.csv_header());
    body.push('\n');
    body.push_str(header);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    std::fs::write(path, body)
        .map_err(|e| AppError::internal(format!("write {}: {e}", path.display())))
}
