//! Quivers without loops or 2-cycles, and their correspondence with
//! skew-symmetric matrices: `b_ij > 0` means `b_ij` arrows `i -> j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::QuiverError;
use crate::matrix::ExchangeMatrix;

/// A finite multidigraph on vertices `0..n`, stored as arrow multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    n: usize,
    arrows: BTreeMap<(usize, usize), BigInt>,
}

impl Quiver {
    /// Builds a quiver from `(tail, head, multiplicity)` triples (0-based).
    /// Repeated pairs accumulate.
    pub fn new<I>(n: usize, arrows: I) -> Result<Self, QuiverError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        if n == 0 {
            return Err(QuiverError::EmptyMatrix);
        }
        let mut map: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (i, j, m) in arrows {
            for v in [i, j] {
                if v >= n {
                    return Err(QuiverError::IndexOutOfRange { index: v + 1, n });
                }
            }
            if !m.is_positive() {
                return Err(QuiverError::InvalidMultiplicity {
                    i: i + 1,
                    j: j + 1,
                    multiplicity: m.to_string(),
                });
            }
            if i == j {
                return Err(QuiverError::LoopPresent { vertex: i + 1 });
            }
            *map.entry((i, j)).or_default() += m;
        }
        for &(i, j) in map.keys() {
            if i < j && map.contains_key(&(j, i)) {
                return Err(QuiverError::TwoCyclePresent { i: i + 1, j: j + 1 });
            }
        }
        Ok(Quiver { n, arrows: map })
    }

    pub fn from_u64_arrows(n: usize, arrows: &[(usize, usize, u64)]) -> Result<Self, QuiverError> {
        Self::new(n, arrows.iter().map(|&(i, j, m)| (i, j, BigInt::from(m))))
    }

    pub fn empty(n: usize) -> Result<Self, QuiverError> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arrows `(tail, head, multiplicity)` in ascending `(tail, head)` order.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.arrows.iter().map(|(&(i, j), m)| (i, j, m))
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// Number of arrows `i -> j` (zero if none).
    pub fn multiplicity(&self, i: usize, j: usize) -> BigInt {
        self.arrows.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn from_matrix(b: &ExchangeMatrix) -> Quiver {
        let n = b.n();
        let mut arrows = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let v = b.get(i, j);
                if v.is_positive() {
                    arrows.insert((i, j), v.clone());
                }
            }
        }
        Quiver { n, arrows }
    }

    pub fn to_matrix(&self) -> ExchangeMatrix {
        let n = self.n;
        let mut entries = vec![BigInt::zero(); n * n];
        for (&(i, j), m) in &self.arrows {
            entries[i * n + j] = m.clone();
            entries[j * n + i] = -m;
        }
        ExchangeMatrix::from_raw(n, entries)
    }

    /// True iff there is no oriented cycle (Kahn's algorithm).
    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.n];
        let mut succ = vec![Vec::new(); self.n];
        for &(i, j) in self.arrows.keys() {
            indegree[j] += 1;
            succ[i].push(j);
        }
        let mut ready: Vec<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        seen == self.n
    }

    /// True iff the underlying undirected graph is connected.
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in self.arrows.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn mutate(&self, k: usize) -> Result<Quiver, QuiverError> {
        Ok(Quiver::from_matrix(&self.to_matrix().mutate(k)?))
    }
}

impl From<&ExchangeMatrix> for Quiver {
    fn from(b: &ExchangeMatrix) -> Self {
        Quiver::from_matrix(b)
    }
}

impl From<&Quiver> for ExchangeMatrix {
    fn from(q: &Quiver) -> Self {
        q.to_matrix()
    }
}
