//! Canonical keys for quivers up to vertex relabeling.
//!
//! The key is the lexicographically smallest serialization of the relabeled
//! matrix over all `n!` orderings. Entries are read column by column above the
//! diagonal, `b[s(0)][s(1)], b[s(0)][s(2)], b[s(1)][s(2)], ...`, so a prefix of
//! the ordering fixes a prefix of the serialization and branches that already
//! compare greater than the best ordering found so far are cut off.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use crate::error::QuiverError;
use crate::matrix::ExchangeMatrix;
use crate::quiver::Quiver;

pub const DEFAULT_PERMUTATION_LIMIT: usize = 10;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuiverCanonKey {
    bytes: Vec<u8>,
}

impl QuiverCanonKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl fmt::Debug for QuiverCanonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuiverCanonKey({})", String::from_utf8_lossy(&self.bytes))
    }
}

impl fmt::Display for QuiverCanonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.bytes))
    }
}

/// Canonical key and the ordering that attains it (`order[p]` is the original
/// vertex placed at position `p`).
#[derive(Debug, Clone)]
pub struct Canonical {
    pub key: QuiverCanonKey,
    pub order: Vec<usize>,
}

pub fn canonical_key(q: &Quiver) -> Result<QuiverCanonKey, QuiverError> {
    canonical_form(&q.to_matrix(), DEFAULT_PERMUTATION_LIMIT).map(|c| c.key)
}

pub fn canonical_key_of_matrix(b: &ExchangeMatrix) -> Result<QuiverCanonKey, QuiverError> {
    canonical_form(b, DEFAULT_PERMUTATION_LIMIT).map(|c| c.key)
}

pub fn canonical_form(b: &ExchangeMatrix, limit: usize) -> Result<Canonical, QuiverError> {
    let n = b.n();
    if n > limit {
        return Err(QuiverError::TooLargeForCanonicalization { n, limit });
    }
    let mut search = Search {
        b,
        best: serialize(b, &(0..n).collect::<Vec<_>>()),
        best_order: (0..n).collect(),
        order: Vec::with_capacity(n),
        used: vec![false; n],
        cur: Vec::with_capacity(n * n.saturating_sub(1) / 2),
        improvements: 0,
    };
    search.descend(Ordering::Equal);
    let mut bytes = format!("{n}:").into_bytes();
    for (idx, v) in search.best.iter().enumerate() {
        if idx > 0 {
            bytes.push(b',');
        }
        bytes.extend_from_slice(v.to_string().as_bytes());
    }
    Ok(Canonical { key: QuiverCanonKey { bytes }, order: search.best_order })
}

fn serialize(b: &ExchangeMatrix, order: &[usize]) -> Vec<BigInt> {
    let mut out = Vec::new();
    for p in 1..order.len() {
        for q in 0..p {
            out.push(b.get(order[q], order[p]).clone());
        }
    }
    out
}

struct Search<'a> {
    b: &'a ExchangeMatrix,
    best: Vec<BigInt>,
    best_order: Vec<usize>,
    order: Vec<usize>,
    used: Vec<bool>,
    cur: Vec<BigInt>,
    improvements: u64,
}

impl Search<'_> {
    /// `state` compares `cur` with the same-length prefix of `best`.
    fn descend(&mut self, mut state: Ordering) {
        let n = self.b.n();
        if self.order.len() == n {
            if state == Ordering::Less {
                self.best.clone_from(&self.cur);
                self.best_order.clone_from(&self.order);
                self.improvements += 1;
            }
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let start = self.cur.len();
            let mut next = state;
            for &u in &self.order {
                let entry = self.b.get(u, v).clone();
                if next == Ordering::Equal {
                    next = entry.cmp(&self.best[self.cur.len()]);
                }
                self.cur.push(entry);
                if next == Ordering::Greater {
                    break;
                }
            }
            if next != Ordering::Greater {
                self.used[v] = true;
                self.order.push(v);
                let before = self.improvements;
                self.descend(next);
                if self.improvements != before {
                    // The new best extends the current prefix.
                    state = Ordering::Equal;
                }
                self.order.pop();
                self.used[v] = false;
            }
            self.cur.truncate(start);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, arrows: &[(usize, usize, u64)]) -> Quiver {
        Quiver::from_u64_arrows(n, arrows).unwrap()
    }

    /// Plain enumeration of all permutations, used to check the pruned search.
    fn brute_min(b: &ExchangeMatrix) -> Vec<BigInt> {
        fn rec(b: &ExchangeMatrix, order: &mut Vec<usize>, best: &mut Option<Vec<BigInt>>) {
            let n = b.n();
            if order.len() == n {
                let s = serialize(b, order);
                if best.as_ref().map_or(true, |cur| s < *cur) {
                    *best = Some(s);
                }
                return;
            }
            for v in 0..n {
                if !order.contains(&v) {
                    order.push(v);
                    rec(b, order, best);
                    order.pop();
                }
            }
        }
        let mut best = None;
        rec(b, &mut Vec::new(), &mut best);
        best.unwrap()
    }

    #[test]
    fn relabeled_path_has_same_key() {
        let a = q(3, &[(0, 1, 1), (1, 2, 1)]);
        let b = q(3, &[(2, 1, 1), (1, 0, 1)]);
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
    }

    #[test]
    fn symmetric_cycle_keys_agree() {
        let a = q(3, &[(0, 1, 2), (1, 2, 2), (2, 0, 2)]);
        let b = q(3, &[(1, 0, 2), (0, 2, 2), (2, 1, 2)]);
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
    }

    #[test]
    fn path_and_cycle_differ() {
        let path = q(3, &[(0, 1, 1), (1, 2, 1)]);
        let cyc = q(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        assert_ne!(canonical_key(&path).unwrap(), canonical_key(&cyc).unwrap());
    }

    #[test]
    fn opposite_orientations_differ() {
        let sink_mid = q(3, &[(0, 1, 1), (2, 1, 1)]);
        let source_mid = q(3, &[(1, 0, 1), (1, 2, 1)]);
        assert_ne!(canonical_key(&sink_mid).unwrap(), canonical_key(&source_mid).unwrap());
    }

    #[test]
    fn order_attains_key() {
        let a = q(4, &[(0, 1, 1), (1, 2, 3), (3, 2, 2), (0, 3, 1)]);
        let c = canonical_form(&a.to_matrix(), 10).unwrap();
        assert_eq!(serialize(&a.to_matrix(), &c.order), brute_min(&a.to_matrix()));
    }

    #[test]
    fn too_large_is_an_error() {
        let big = Quiver::empty(11).unwrap();
        assert_eq!(
            canonical_key(&big).unwrap_err(),
            QuiverError::TooLargeForCanonicalization { n: 11, limit: 10 }
        );
    }

    #[test]
    fn pruned_search_matches_full_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let mut arrows = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let v: i64 = rng.gen_range(-2..=2);
                    if v > 0 {
                        arrows.push((i, j, v as u64));
                    } else if v < 0 {
                        arrows.push((j, i, (-v) as u64));
                    }
                }
            }
            let b = q(n, &arrows).to_matrix();
            let c = canonical_form(&b, 10).unwrap();
            assert_eq!(serialize(&b, &c.order), brute_min(&b));
        }
    }
}
