//! Raw per-task files: one JSON metadata line followed by a CSV body.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentKind;
use crate::error::CliError;
use crate::tasks::{ParamPoint, Task, TaskOutput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawHeader {
    pub kind: ExperimentKind,
    pub task: String,
    pub point: ParamPoint,
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawFile {
    pub header: RawHeader,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RawFile {
    pub fn new(kind: ExperimentKind, task: &Task, out: TaskOutput) -> Self {
        Self {
            header: RawHeader {
                kind,
                task: task.id.clone(),
                point: task.point,
                index: task.index,
                seed: task.seed,
                dim: out.dim,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            columns: out.columns.iter().map(|c| c.to_string()).collect(),
            rows: out.rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Floats use the shortest round-trip form, so reading back is lossless.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(&self.header).expect("header serializes");
        out.push(b'\n');
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let bad = |reason: String| CliError::Raw { path: path.to_path_buf(), reason };
        let (first, body) = text.split_once('\n').ok_or_else(|| bad("missing metadata line".into()))?;
        let header: RawHeader = serde_json::from_str(first).map_err(|e| bad(format!("metadata: {e}")))?;
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let columns = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| {
                let r = r.map_err(|e| bad(e.to_string()))?;
                r.iter().map(|v| v.parse::<f64>().map_err(|e| bad(format!("{v:?}: {e}")))).collect()
            })
            .collect::<Result<Vec<Vec<f64>>, CliError>>()?;
        Ok(Self { header, columns, rows })
    }
}

/// Writes through a temporary file in the same directory and renames it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
