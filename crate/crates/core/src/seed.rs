//! Seeds and seed mutation.
//!
//! A seed pairs an ordered cluster of Laurent polynomials (written in the
//! initial variables `x1..xn`) with an exchange matrix. Mutation in direction
//! `i` replaces `x_i` by `(M_plus + M_minus) / x_i` where
//! `M_plus = prod_{b_ji > 0} x_j^{b_ji}` and `M_minus = prod_{b_ji < 0} x_j^{-b_ji}`.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};

use crate::error::{LaurentError, QuiverError, SeedError};
use crate::laurent::LaurentPolynomial;
use crate::matrix::ExchangeMatrix;

/// A cluster variable together with its canonical rendering.
#[derive(Clone, PartialEq, Eq)]
pub struct ClusterVariable {
    poly: LaurentPolynomial,
    text: String,
}

impl ClusterVariable {
    pub fn new(poly: LaurentPolynomial) -> Self {
        let text = poly.to_string();
        ClusterVariable { poly, text }
    }

    pub fn poly(&self) -> &LaurentPolynomial {
        &self.poly
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl fmt::Debug for ClusterVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Canonical key of a seed: its cluster as an unordered multiset of renderings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedKey {
    bytes: Vec<u8>,
}

impl SeedKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl fmt::Debug for SeedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeedKey({:?})", String::from_utf8_lossy(&self.bytes))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Seed {
    cluster: Vec<Arc<ClusterVariable>>,
    matrix: ExchangeMatrix,
}

impl Seed {
    /// The seed `((x1, ..., xn), B)`.
    pub fn initial(matrix: ExchangeMatrix) -> Seed {
        let n = matrix.n();
        let cluster =
            (0..n).map(|i| Arc::new(ClusterVariable::new(LaurentPolynomial::var(n, i)))).collect();
        Seed { cluster, matrix }
    }

    pub fn new(cluster: Vec<LaurentPolynomial>, matrix: ExchangeMatrix) -> Result<Seed, SeedError> {
        let n = matrix.n();
        if cluster.len() != n {
            return Err(SeedError::ClusterSizeMismatch { cluster: cluster.len(), n });
        }
        for (i, x) in cluster.iter().enumerate() {
            if x.nvars() != n {
                return Err(LaurentError::VariableCountMismatch { left: n, right: x.nvars() }.into());
            }
            if x.is_zero() {
                return Err(SeedError::ZeroClusterVariable { index: i + 1 });
            }
        }
        Ok(Seed {
            cluster: cluster.into_iter().map(|p| Arc::new(ClusterVariable::new(p))).collect(),
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn cluster(&self) -> &[Arc<ClusterVariable>] {
        &self.cluster
    }

    pub fn variable(&self, i: usize) -> &LaurentPolynomial {
        self.cluster[i].poly()
    }

    pub fn renderings(&self) -> Vec<String> {
        self.cluster.iter().map(|v| v.text().to_owned()).collect()
    }

    fn check_index(&self, i: usize) -> Result<(), SeedError> {
        if i >= self.n() {
            Err(QuiverError::IndexOutOfRange { index: i + 1, n: self.n() }.into())
        } else {
            Ok(())
        }
    }

    /// `(M_plus, M_minus)` for direction `i`; empty products are 1.
    pub fn exchange_binomial(
        &self,
        i: usize,
    ) -> Result<(LaurentPolynomial, LaurentPolynomial), SeedError> {
        self.check_index(i)?;
        let n = self.n();
        let mut plus = LaurentPolynomial::one(n);
        let mut minus = LaurentPolynomial::one(n);
        for (j, b_ji) in self.matrix.column(i) {
            let e = b_ji
                .abs()
                .to_u32()
                .ok_or_else(|| LaurentError::ExponentTooLarge(b_ji.to_string()))?;
            let factor = self.variable(j).pow(e)?;
            if b_ji.is_positive() {
                plus = plus.mul(&factor)?;
            } else {
                minus = minus.mul(&factor)?;
            }
        }
        Ok((plus, minus))
    }

    /// Mutation in direction `i`: one cluster entry changes and the matrix mutates.
    pub fn mutate(&self, i: usize) -> Result<Seed, SeedError> {
        let (plus, minus) = self.exchange_binomial(i)?;
        let numerator = plus.add(&minus)?;
        let new = numerator
            .exact_div(self.variable(i))
            .map_err(|source| SeedError::ExchangeDivisionFailed { vertex: i + 1, source })?;
        let mut cluster = self.cluster.clone();
        cluster[i] = Arc::new(ClusterVariable::new(new));
        Ok(Seed { cluster, matrix: self.matrix.mutate(i)? })
    }

    /// Left-to-right composition of mutations. Failures report the
    /// 1-based position in `ks`.
    pub fn apply_sequence(&self, ks: &[usize]) -> Result<Seed, SeedError> {
        let mut s = self.clone();
        for (pos, &k) in ks.iter().enumerate() {
            s = s.mutate(k).map_err(|e| SeedError::SequenceStepFailed {
                position: pos + 1,
                vertex: k + 1,
                source: Box::new(e),
            })?;
        }
        Ok(s)
    }

    pub fn key(&self) -> SeedKey {
        let mut texts: Vec<&str> = self.cluster.iter().map(|v| v.text()).collect();
        texts.sort_unstable();
        SeedKey { bytes: texts.join("\n").into_bytes() }
    }

    /// Relabels positions: entry `p` of the result is entry `perm[p]` of `self`,
    /// with the matrix conjugated to match.
    pub fn permute(&self, perm: &[usize]) -> Result<Seed, SeedError> {
        let matrix = self.matrix.permute(perm)?;
        let cluster = perm.iter().map(|&p| self.cluster[p].clone()).collect();
        Ok(Seed { cluster, matrix })
    }

    /// Positions of `other`'s variables in `self`, if the clusters agree as sets.
    pub fn matching_permutation(&self, other: &Seed) -> Option<Vec<usize>> {
        if self.n() != other.n() {
            return None;
        }
        let mut used = vec![false; self.n()];
        let mut perm = Vec::with_capacity(self.n());
        for v in &other.cluster {
            let pos = (0..self.n()).find(|&p| !used[p] && self.cluster[p].text() == v.text())?;
            used[pos] = true;
            perm.push(pos);
        }
        Some(perm)
    }

    /// Largest denominator degree over the cluster.
    pub fn max_denominator_degree(&self) -> u64 {
        self.cluster.iter().map(|v| v.poly().denominator_degree()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Seed").field("cluster", &self.cluster).field("matrix", &self.matrix).finish()
    }
}
