//! Skew-symmetric exchange matrices and matrix mutation.
//!
//! Vertex indices are 0-based in this API. The text/JSON layer in
//! [`crate::format`] converts to and from the 1-based indices used in files.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::QuiverError;

/// An `n x n` skew-symmetric integer matrix `B = (b_ij)`.
///
/// Values are immutable: every operation that changes entries returns a new
/// matrix, so a matrix can be shared freely between threads.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl ExchangeMatrix {
    /// Builds a matrix from rows, rejecting non-square or non-skew-symmetric input.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, QuiverError> {
        let n = rows.len();
        if n == 0 {
            return Err(QuiverError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(QuiverError::NotSquare { row: i + 1, len: row.len(), n });
            }
            entries.extend(row);
        }
        let b = ExchangeMatrix { n, entries };
        b.validate()?;
        Ok(b)
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, QuiverError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    /// The `n x n` zero matrix.
    pub fn zero(n: usize) -> Result<Self, QuiverError> {
        if n == 0 {
            return Err(QuiverError::EmptyMatrix);
        }
        Ok(ExchangeMatrix { n, entries: vec![BigInt::zero(); n * n] })
    }

    /// Builds from a flat row-major buffer without validation. Callers must
    /// guarantee skew-symmetry.
    pub(crate) fn from_raw(n: usize, entries: Vec<BigInt>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        ExchangeMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|v| v.abs()).max().unwrap_or_default()
    }

    /// Checks skew-symmetry. The reported pair is 1-based with `i <= j`.
    pub fn validate(&self) -> Result<(), QuiverError> {
        for i in 0..self.n {
            for j in i..self.n {
                if *self.get(i, j) != -self.get(j, i) {
                    return Err(QuiverError::NotSkewSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }

    fn check_index(&self, k: usize) -> Result<(), QuiverError> {
        if k >= self.n {
            Err(QuiverError::IndexOutOfRange { index: k + 1, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Mutation in direction `k`.
    ///
    /// Entries in row or column `k` change sign. Every other entry gains
    /// `b_ik * b_kj` when both factors are positive, loses it when both are
    /// negative, and is unchanged otherwise. This is the halved expression
    /// `(|b_ik| b_kj + b_ik |b_kj|) / 2` evaluated without dividing.
    pub fn mutate(&self, k: usize) -> Result<ExchangeMatrix, QuiverError> {
        self.check_index(k)?;
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let b_ij = self.get(i, j);
                let v = if i == k || j == k {
                    -b_ij
                } else {
                    let b_ik = self.get(i, k);
                    let b_kj = self.get(k, j);
                    if b_ik.is_positive() && b_kj.is_positive() {
                        b_ij + b_ik * b_kj
                    } else if b_ik.is_negative() && b_kj.is_negative() {
                        b_ij - b_ik * b_kj
                    } else {
                        b_ij.clone()
                    }
                };
                out.push(v);
            }
        }
        Ok(ExchangeMatrix::from_raw(n, out))
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<ExchangeMatrix, QuiverError> {
        let mut b = self.clone();
        for &k in ks {
            b = b.mutate(k)?;
        }
        Ok(b)
    }

    /// The principal submatrix on `vertices`, reindexed in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Result<ExchangeMatrix, QuiverError> {
        if vertices.is_empty() {
            return Err(QuiverError::EmptySubset);
        }
        for (pos, &v) in vertices.iter().enumerate() {
            self.check_index(v)?;
            if vertices[..pos].contains(&v) {
                return Err(QuiverError::DuplicateVertex { index: v + 1 });
            }
        }
        let m = vertices.len();
        let mut out = Vec::with_capacity(m * m);
        for &i in vertices {
            for &j in vertices {
                out.push(self.get(i, j).clone());
            }
        }
        Ok(ExchangeMatrix::from_raw(m, out))
    }

    /// Relabels vertices: entry `(i, j)` of the result is `b[perm[i]][perm[j]]`.
    pub fn permute(&self, perm: &[usize]) -> Result<ExchangeMatrix, QuiverError> {
        if perm.len() != self.n {
            return Err(QuiverError::DimensionMismatch { expected: self.n, found: perm.len() });
        }
        self.restrict(perm)
    }

    /// Column `k` with signs split: `(j, b_jk)` for every nonzero entry.
    pub fn column(&self, k: usize) -> impl Iterator<Item = (usize, &BigInt)> {
        (0..self.n).map(move |j| (j, self.get(j, k))).filter(|(_, v)| !v.is_zero())
    }
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(ExchangeMatrix::zero(3).unwrap().validate().is_ok());
        assert!(ExchangeMatrix::from_i64_rows(&[[0, 1], [-1, 0]]).is_ok());
        assert_eq!(
            ExchangeMatrix::from_i64_rows(&[[0, 1], [1, 0]]).unwrap_err(),
            QuiverError::NotSkewSymmetric { i: 1, j: 2 }
        );
        assert_eq!(
            ExchangeMatrix::from_i64_rows(&[[1]]).unwrap_err(),
            QuiverError::NotSkewSymmetric { i: 1, j: 1 }
        );
        assert_eq!(ExchangeMatrix::zero(0).unwrap_err(), QuiverError::EmptyMatrix);
    }

    #[test]
    fn mutate_path_at_middle_gives_three_cycle() {
        let b = m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        assert_eq!(b.mutate(1).unwrap(), m(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]));
    }

    #[test]
    fn mutate_markov_at_first_vertex() {
        let b = m(&[&[0, 2, -2], &[-2, 0, 2], &[2, -2, 0]]);
        assert_eq!(b.mutate(0).unwrap(), m(&[&[0, -2, 2], &[2, 0, -2], &[-2, 2, 0]]));
    }

    #[test]
    fn mutate_rejects_bad_index() {
        let b = ExchangeMatrix::zero(2).unwrap();
        assert_eq!(b.mutate(2).unwrap_err(), QuiverError::IndexOutOfRange { index: 3, n: 2 });
    }

    #[test]
    fn restrict_examples() {
        let a3 = m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        assert_eq!(a3.restrict(&[0, 1, 2]).unwrap(), a3);
        assert_eq!(a3.restrict(&[0, 2]).unwrap(), ExchangeMatrix::zero(2).unwrap());
        assert_eq!(a3.restrict(&[]).unwrap_err(), QuiverError::EmptySubset);
        assert_eq!(a3.restrict(&[0, 5]).unwrap_err(), QuiverError::IndexOutOfRange { index: 6, n: 3 });
        assert_eq!(a3.restrict(&[1, 1]).unwrap_err(), QuiverError::DuplicateVertex { index: 2 });
    }

    #[test]
    fn huge_entries_do_not_overflow() {
        let big = BigInt::from(u64::MAX) * BigInt::from(u64::MAX);
        let b = ExchangeMatrix::from_rows(vec![
            vec![BigInt::zero(), big.clone(), BigInt::zero()],
            vec![-big.clone(), BigInt::zero(), big.clone()],
            vec![BigInt::zero(), -big.clone(), BigInt::zero()],
        ])
        .unwrap();
        let mu = b.mutate(1).unwrap();
        assert_eq!(*mu.get(0, 2), &big * &big);
        assert_eq!(mu.mutate(1).unwrap(), b);
    }
}
