//! Session state: a root seed, the applied mutations, and the current seed.

use std::time::{SystemTime, UNIX_EPOCH};

use cluster_core::format::{laurent_to_json, matrix_to_json, quiver_to_dot, quiver_to_json, seed_to_json};
use cluster_core::rank3::{report, report_json};
use cluster_core::{ExchangeMatrix, Quiver, Seed, SeedError};
use serde_json::{json, Value};

pub fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub root: Seed,
    /// 0-based directions, oldest first.
    pub history: Vec<usize>,
    pub current: Seed,
    pub created: u64,
    pub updated: u64,
}

/// What changed in one mutation or undo.
#[derive(Debug, Clone)]
pub struct Change {
    pub vertex: usize,
    pub old: String,
    pub new: String,
}

impl Session {
    pub fn new(id: String, root: ExchangeMatrix) -> Session {
        let root = Seed::initial(root);
        let t = now_secs();
        Session { id, current: root.clone(), root, history: Vec::new(), created: t, updated: t }
    }

    pub fn n(&self) -> usize {
        self.root.n()
    }

    /// Rebuilds a session from its root and history.
    pub fn replay(id: String, root: ExchangeMatrix, history: &[usize]) -> Result<Session, SeedError> {
        let mut s = Session::new(id, root);
        s.current = s.root.apply_sequence(history)?;
        s.history = history.to_vec();
        Ok(s)
    }

    /// Commits an already computed successor of `current`.
    pub fn push(&mut self, vertex: usize, next: Seed) -> Change {
        let change = Change {
            vertex,
            old: self.current.variable_text(vertex),
            new: next.variable_text(vertex),
        };
        self.current = next;
        self.history.push(vertex);
        self.updated = now_secs();
        change
    }

    /// Replaces `current` with its mutation at the last history entry.
    pub fn pop(&mut self, previous: Seed) -> Option<Change> {
        let vertex = self.history.pop()?;
        let change = Change {
            vertex,
            old: self.current.variable_text(vertex),
            new: previous.variable_text(vertex),
        };
        self.current = previous;
        self.updated = now_secs();
        Some(change)
    }

    pub fn verify(&self) -> Result<bool, SeedError> {
        let replayed = self.root.apply_sequence(&self.history)?;
        Ok(replayed.cluster().iter().zip(self.current.cluster()).all(|(a, b)| a.text() == b.text())
            && replayed.matrix() == self.current.matrix())
    }

    pub fn rank3_report(&self) -> Value {
        if self.n() != 3 {
            return Value::Null;
        }
        let root_acyclic = Quiver::from_matrix(self.root.matrix()).is_acyclic();
        match report(&Quiver::from_matrix(self.current.matrix()), root_acyclic) {
            Ok(r) => report_json(&r),
            Err(_) => Value::Null,
        }
    }

    pub fn summary(&self) -> Value {
        let cluster: Vec<Value> = self
            .current
            .cluster()
            .iter()
            .enumerate()
            .map(|(i, v)| json!({ "index": i + 1, "text": v.text(), "terms": laurent_to_json(v.poly())["terms"] }))
            .collect();
        json!({
            "id": self.id,
            "n": self.n(),
            "quiver": quiver_to_json(&Quiver::from_matrix(self.current.matrix())),
            "matrix": matrix_to_json(self.current.matrix()),
            "cluster": cluster,
            "history": self.history.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "rank3": self.rank3_report(),
            "created": self.created,
            "updated": self.updated,
        })
    }

    pub fn export_json(&self) -> Value {
        json!({
            "id": self.id,
            "root": seed_to_json(&self.root),
            "history": self.history.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "current": seed_to_json(&self.current),
        })
    }

    pub fn export_dot(&self) -> String {
        quiver_to_dot(&Quiver::from_matrix(self.current.matrix()))
    }
}

trait VariableText {
    fn variable_text(&self, i: usize) -> String;
}

impl VariableText for Seed {
    fn variable_text(&self, i: usize) -> String {
        self.cluster()[i].text().to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> ExchangeMatrix {
        ExchangeMatrix::from_i64_rows(&[[0, 1], [-1, 0]]).unwrap()
    }

    #[test]
    fn push_pop_and_verify() {
        let mut s = Session::new("t".into(), a2());
        let next = s.current.mutate(0).unwrap();
        let c = s.push(0, next);
        assert_eq!((c.old.as_str(), c.new.as_str()), ("x1", "(x2 + 1)/x1"));
        assert!(s.verify().unwrap());
        let prev = s.current.mutate(0).unwrap();
        let c = s.pop(prev).unwrap();
        assert_eq!(c.new, "x1");
        assert!(s.history.is_empty());
        assert!(s.pop(s.current.clone()).is_none());
    }

    #[test]
    fn replay_matches_pushes() {
        let s = Session::replay("t".into(), a2(), &[0, 1, 0]).unwrap();
        assert_eq!(s.current.renderings(), ["(x1 + 1)/x2", "(x1 + x2 + 1)/(x1*x2)"]);
        assert!(s.verify().unwrap());
    }
}
