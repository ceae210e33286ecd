//! Multivariate Laurent polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Terms live in a hash map keyed by exponent vector; zero coefficients are
//! never stored, so equal polynomials have equal term maps. Ordered output
//! (rendering, JSON) uses graded-lex with `x1 > x2 > ... > xn`.

mod kernel;
mod text;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::LaurentError;
use kernel::{BoxIndex, DivisionFrame, Strategy};

pub use text::parse;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[i32]>);

impl Monomial {
    pub fn new(exponents: Vec<i32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn checked_mul(&self, other: &Monomial) -> Result<Monomial, LaurentError> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| {
                a.checked_add(*b).ok_or_else(|| LaurentError::ExponentTooLarge(format!("{a}+{b}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Monomial::new)
    }

    /// Graded-lex comparison: total degree first, then lexicographic with `x1` largest.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// Which multiplication/division routine runs. Only tests pick one explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    Boxed(Strategy),
    /// Exponent vectors as keys, no box indexing.
    #[cfg_attr(not(test), allow(dead_code))]
    Generic,
}

impl Kernel {
    const AUTO: Kernel = Kernel::Boxed(Strategy { layout: None, width: None });
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: HashMap<Monomial, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial { nvars, terms: HashMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    /// The coordinate variable `x_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, index), BigInt::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: BigInt) -> Self {
        assert_eq!(m.nvars(), nvars, "monomial length must equal nvars");
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { nvars, terms }
    }

    /// Builds a polynomial from terms, summing repeated monomials and
    /// dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut map: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(LaurentError::VariableCountMismatch { left: nvars, right: m.nvars() });
            }
            *map.entry(m).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(LaurentPolynomial { nvars, terms: map })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Unordered term iterator.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lex order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    fn check_vars(&self, other: &Self) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            Err(LaurentError::VariableCountMismatch { left: self.nvars, right: other.nvars })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_vars(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.mul_with(other, Kernel::AUTO)
    }

    pub(crate) fn mul_with(&self, other: &Self, kernel: Kernel) -> Result<Self, LaurentError> {
        self.check_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if self.is_monomial() || other.is_monomial() {
            let (mono, poly) = if self.is_monomial() { (self, other) } else { (other, self) };
            let (m, c) = mono.terms.iter().next().unwrap();
            return poly.mul_term(m, c);
        }
        let Kernel::Boxed(strategy) = kernel else {
            return self.mul_generic(other);
        };
        let (lo_a, hi_a) = self.exponent_bounds();
        let (lo_b, hi_b) = other.exponent_bounds();
        let lo = add_bounds(&lo_a, &lo_b)?;
        let hi = add_bounds(&hi_a, &hi_b)?;
        let Some(bx) = BoxIndex::new(&lo, &hi) else {
            return self.mul_generic(other);
        };
        let a = self.indexed(&bx, &lo_a);
        let b = if std::ptr::eq(self, other) { None } else { Some(other.indexed(&bx, &lo_b)) };
        let out = kernel::product(&a, b.as_deref(), &bx, strategy);
        self.from_indexed(&bx, out)
    }

    fn indexed<'a>(&'a self, bx: &BoxIndex, origin: &[i64]) -> Vec<(u64, &'a BigInt)> {
        self.terms.iter().map(|(m, c)| (bx.index(m.exponents(), origin), c)).collect()
    }

    fn from_indexed(&self, bx: &BoxIndex, terms: Vec<(u64, BigInt)>) -> Result<Self, LaurentError> {
        let mut map = HashMap::with_capacity(terms.len());
        for (idx, c) in terms {
            map.insert(Monomial::new(bx.exponents(idx)), c);
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms: map })
    }

    fn mul_term(&self, m: &Monomial, c: &BigInt) -> Result<Self, LaurentError> {
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (mm, cc) in &self.terms {
            terms.insert(mm.checked_mul(m)?, cc * c);
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    fn mul_generic(&self, other: &Self) -> Result<Self, LaurentError> {
        let mut terms: HashMap<Monomial, BigInt> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *terms.entry(ma.checked_mul(mb)?).or_default() += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    pub fn pow(&self, mut e: u32) -> Result<Self, LaurentError> {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.square()?;
            }
        }
        Ok(acc)
    }

    pub fn square(&self) -> Result<Self, LaurentError> {
        self.mul(self)
    }

    /// Per-variable minimum and maximum exponent. Panics on the zero polynomial.
    pub fn exponent_bounds(&self) -> (Vec<i64>, Vec<i64>) {
        assert!(!self.is_zero(), "exponent bounds of the zero polynomial");
        let mut lo = vec![i64::MAX; self.nvars];
        let mut hi = vec![i64::MIN; self.nvars];
        for m in self.terms.keys() {
            for (k, &e) in m.exponents().iter().enumerate() {
                lo[k] = lo[k].min(e as i64);
                hi[k] = hi[k].max(e as i64);
            }
        }
        (lo, hi)
    }

    /// Smallest `d >= 0` with `self * x^d` free of negative exponents.
    pub fn denominator_monomial(&self) -> Result<Monomial, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        let (lo, _) = self.exponent_bounds();
        Ok(Monomial::new(lo.into_iter().map(|e| (-e).max(0) as i32).collect()))
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    ///
    /// Leading terms are taken in lexicographic order (`x1` most significant);
    /// the division must leave no remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, LaurentError> {
        self.exact_div_with(divisor, Kernel::AUTO)
    }

    pub(crate) fn exact_div_with(&self, divisor: &Self, kernel: Kernel) -> Result<Self, LaurentError> {
        self.check_vars(divisor)?;
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if divisor.is_monomial() {
            return self.div_by_term(divisor);
        }
        let (lo_p, hi_p) = self.exponent_bounds();
        let (lo_d, hi_d) = divisor.exponent_bounds();
        // The lowest and highest parts in each variable multiply, which pins
        // the exponent range of any quotient.
        let lo_q: Vec<i64> = lo_p.iter().zip(&lo_d).map(|(p, d)| p - d).collect();
        let hi_q: Vec<i64> = hi_p.iter().zip(&hi_d).map(|(p, d)| p - d).collect();
        if lo_q.iter().zip(&hi_q).any(|(l, h)| l > h) {
            return Err(LaurentError::DivisionNotExact);
        }
        let bx = match kernel {
            Kernel::Boxed(strategy) => BoxIndex::new(&lo_p, &hi_p).map(|bx| (bx, strategy)),
            Kernel::Generic => None,
        };
        let Some((bx, strategy)) = bx else {
            return self.div_generic(divisor, &lo_q, &hi_q);
        };
        let p = self.indexed(&bx, &bx.lo);
        let d = divisor.indexed(&bx, &lo_d);
        let frame = DivisionFrame { bx: &bx, lo_d: &lo_d, lo_q: &lo_q, hi_q: &hi_q };
        let q = kernel::quotient(&p, &d, &frame, strategy)?;
        let terms = q.into_iter().map(|(e, c)| (Monomial::new(e), c)).collect();
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    fn div_by_term(&self, divisor: &Self) -> Result<Self, LaurentError> {
        let (m, c) = divisor.terms.iter().next().unwrap();
        let inv = Monomial::new(m.exponents().iter().map(|e| -e).collect());
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (mm, cc) in &self.terms {
            let (q, r) = cc.div_rem(c);
            if !r.is_zero() {
                return Err(LaurentError::DivisionNotExact);
            }
            terms.insert(mm.checked_mul(&inv)?, q);
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms })
    }

    /// Leading-term division over an ordered map of exponent vectors.
    fn div_generic(&self, divisor: &Self, lo_q: &[i64], hi_q: &[i64]) -> Result<Self, LaurentError> {
        let to_key = |m: &Monomial| m.exponents().iter().map(|&e| e as i64).collect::<Vec<i64>>();
        let mut rem: BTreeMap<Vec<i64>, BigInt> =
            self.terms.iter().map(|(m, c)| (to_key(m), c.clone())).collect();
        let mut dterms: Vec<(Vec<i64>, &BigInt)> =
            divisor.terms.iter().map(|(m, c)| (to_key(m), c)).collect();
        dterms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let (lead_e, lead_c) = (dterms[0].0.clone(), dterms[0].1);
        let mut quotient = HashMap::new();
        while let Some((top, c)) = rem.pop_last() {
            let q_e: Vec<i64> = top.iter().zip(&lead_e).map(|(t, l)| t - l).collect();
            if q_e.iter().enumerate().any(|(k, &e)| e < lo_q[k] || e > hi_q[k]) {
                return Err(LaurentError::DivisionNotExact);
            }
            let (qc, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return Err(LaurentError::DivisionNotExact);
            }
            for (de, dc) in dterms.iter().skip(1) {
                let key: Vec<i64> = q_e.iter().zip(de).map(|(a, b)| a + b).collect();
                let entry = rem.entry(key.clone()).or_default();
                *entry -= &qc * *dc;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            let exps = q_e
                .iter()
                .map(|&e| i32::try_from(e).map_err(|_| LaurentError::ExponentTooLarge(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            quotient.insert(Monomial::new(exps), qc);
        }
        Ok(LaurentPolynomial { nvars: self.nvars, terms: quotient })
    }

    /// Total degree of the denominator monomial.
    pub fn denominator_degree(&self) -> u64 {
        self.denominator_monomial()
            .map(|d| d.exponents().iter().map(|&e| e as u64).sum())
            .unwrap_or(0)
    }

    /// Numerator terms after clearing the denominator, descending graded-lex.
    pub fn numerator_terms(&self) -> Vec<(Monomial, BigInt)> {
        let Ok(d) = self.denominator_monomial() else {
            return Vec::new();
        };
        let mut v: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.checked_mul(&d).expect("shift stays in range"), c.clone()))
            .collect();
        v.sort_by(|a, b| b.0.grlex_cmp(&a.0));
        v
    }

    /// Evaluates the coefficient sum `P(1, ..., 1)`.
    pub fn value_at_ones(&self) -> BigInt {
        self.terms.values().sum()
    }
}

fn add_bounds(a: &[i64], b: &[i64]) -> Result<Vec<i64>, LaurentError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            x.checked_add(*y)
                .filter(|s| i32::try_from(*s).is_ok())
                .ok_or_else(|| LaurentError::ExponentTooLarge(format!("{x}+{y}")))
        })
        .collect()
}
