//! Append-only JSON-lines log of session events. Only roots and applied
//! directions are stored; seeds are recomputed on load.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use cluster_core::format::{matrix_from_json_value, matrix_to_json};
use cluster_core::ExchangeMatrix;
use log::warn;
use serde_json::{json, Value};

use crate::session::Session;

pub struct Journal {
    path: PathBuf,
    file: Mutex<File>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Mutate(usize),
    Undo,
}

impl Journal {
    pub fn open(path: &Path) -> std::io::Result<Journal> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Journal { path: path.to_path_buf(), file: Mutex::new(file) })
    }

    fn append(&self, line: Value) -> std::io::Result<()> {
        let mut f = self.file.lock().unwrap_or_else(|e| e.into_inner());
        writeln!(f, "{line}")?;
        f.flush()
    }

    pub fn created(&self, id: &str, root: &ExchangeMatrix) -> std::io::Result<()> {
        self.append(json!({ "event": "create", "id": id, "matrix": matrix_to_json(root) }))
    }

    pub fn event(&self, id: &str, event: Event) -> std::io::Result<()> {
        match event {
            Event::Mutate(k) => self.append(json!({ "event": "mutate", "id": id, "vertex": k + 1 })),
            Event::Undo => self.append(json!({ "event": "undo", "id": id })),
        }
    }

    /// Rebuilds every session in the log. Malformed lines and sessions whose
    /// history no longer replays are skipped with a warning.
    pub fn load(&self) -> std::io::Result<Vec<Session>> {
        let reader = BufReader::new(File::open(&self.path)?);
        let mut roots: Vec<(String, ExchangeMatrix)> = Vec::new();
        let mut histories: HashMap<String, Vec<usize>> = HashMap::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let Ok(v) = serde_json::from_str::<Value>(&line) else {
                warn!("journal line {}: not JSON", lineno + 1);
                continue;
            };
            let id = v["id"].as_str().unwrap_or_default().to_string();
            match v["event"].as_str() {
                Some("create") => match matrix_from_json_value(&v["matrix"]) {
                    Ok(b) => {
                        histories.insert(id.clone(), Vec::new());
                        roots.push((id, b));
                    }
                    Err(e) => warn!("journal line {}: {e}", lineno + 1),
                },
                Some("mutate") => match (histories.get_mut(&id), v["vertex"].as_u64()) {
                    (Some(h), Some(k)) if k >= 1 => h.push(k as usize - 1),
                    _ => warn!("journal line {}: bad mutate event", lineno + 1),
                },
                Some("undo") => match histories.get_mut(&id) {
                    Some(h) => {
                        h.pop();
                    }
                    None => warn!("journal line {}: undo for unknown session", lineno + 1),
                },
                _ => warn!("journal line {}: unknown event", lineno + 1),
            }
        }
        let mut out = Vec::new();
        for (id, root) in roots {
            let history = histories.remove(&id).unwrap_or_default();
            match Session::replay(id.clone(), root, &history) {
                Ok(s) => out.push(s),
                Err(e) => warn!("session {id} does not replay: {e}"),
            }
        }
        Ok(out)
    }
}
