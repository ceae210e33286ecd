//! Coefficient kernels for multiplication and exact division.
//!
//! Monomials are mapped into a mixed-radix box covering every exponent
//! involved; the last variable is the fastest digit, so index order is
//! lexicographic with `x1` most significant, and adding indices multiplies
//! monomials as long as the result stays inside the box.
//!
//! Two layouts exist. `Dense` uses one buffer slot per box index and is used
//! when the box is small and reasonably filled. `Packed` keys a hash map by
//! box index; division additionally keeps a max-heap of live indices.
//!
//! Coefficients run either as `BigInt` or as 256-bit fixed-width integers.
//! The fixed-width path is only entered when bit-length bounds show that no
//! intermediate value can overflow; division re-checks the bound for every
//! quotient coefficient and reports `None` so the caller can retry with
//! `BigInt`.

use std::collections::BinaryHeap;

use ethnum::I256;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::LaurentError;

/// Largest dense buffer, in coefficient slots.
const DENSE_LIMIT: u64 = 1 << 18;
/// Dense layout needs at least one expected term per this many slots.
const DENSE_FILL: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Layout {
    Dense,
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Width {
    Fixed,
    Big,
}

/// Kernel selection. `None` fields are chosen automatically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Strategy {
    pub layout: Option<Layout>,
    pub width: Option<Width>,
}

pub(crate) struct BoxIndex {
    pub lo: Vec<i64>,
    ext: Vec<u64>,
    stride: Vec<u64>,
    pub size: u64,
}

impl BoxIndex {
    /// `None` when the box does not fit in 64-bit indices.
    pub fn new(lo: &[i64], hi: &[i64]) -> Option<BoxIndex> {
        let n = lo.len();
        let mut ext = Vec::with_capacity(n);
        for k in 0..n {
            ext.push(u64::try_from(hi[k].checked_sub(lo[k])?.checked_add(1)?).ok()?);
        }
        let mut stride = vec![1u64; n];
        let mut size = 1u64;
        for k in (0..n).rev() {
            stride[k] = size;
            size = size.checked_mul(ext[k])?;
        }
        Some(BoxIndex { lo: lo.to_vec(), ext, stride, size })
    }

    /// Index of `exps - origin`.
    pub fn index(&self, exps: &[i32], origin: &[i64]) -> u64 {
        exps.iter()
            .enumerate()
            .map(|(k, &e)| (e as i64 - origin[k]) as u64 * self.stride[k])
            .sum()
    }

    pub fn digits_into(&self, mut idx: u64, out: &mut [i64]) {
        for k in 0..self.ext.len() {
            out[k] = (idx / self.stride[k]) as i64;
            idx %= self.stride[k];
        }
    }

    /// Exponents of the monomial at `idx` (relative to the box origin).
    pub fn exponents(&self, idx: u64) -> Vec<i32> {
        let mut d = vec![0; self.ext.len()];
        self.digits_into(idx, &mut d);
        d.iter().zip(&self.lo).map(|(a, b)| (a + b) as i32).collect()
    }

    fn dense_ok(&self, expected_terms: u64) -> bool {
        self.size <= DENSE_LIMIT && self.size <= expected_terms.saturating_mul(DENSE_FILL)
    }
}

trait Coeff: Clone {
    /// Largest magnitude (in bits) any intermediate value may reach.
    const CAPACITY_BITS: u64;
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn from_big(c: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn magnitude_bits(&self) -> u64;
    fn double(&self) -> Self;
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn sub_mul(&mut self, a: &Self, b: &Self);
    /// Quotient when `d` divides `self` exactly.
    fn div_exact(&self, d: &Self) -> Option<Self>;
}

impl Coeff for BigInt {
    const CAPACITY_BITS: u64 = u64::MAX;

    fn nil() -> Self {
        BigInt::zero()
    }
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
    fn from_big(c: &BigInt) -> Option<Self> {
        Some(c.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn magnitude_bits(&self) -> u64 {
        self.bits()
    }
    fn double(&self) -> Self {
        self << 1
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }
}

impl Coeff for I256 {
    const CAPACITY_BITS: u64 = 254;

    fn nil() -> Self {
        I256::ZERO
    }
    fn is_nil(&self) -> bool {
        *self == I256::ZERO
    }
    fn from_big(c: &BigInt) -> Option<Self> {
        if c.bits() > Self::CAPACITY_BITS {
            return None;
        }
        let raw = c.to_signed_bytes_le();
        let fill = if c.is_negative() { 0xff } else { 0 };
        let mut bytes = [fill; 32];
        bytes[..raw.len()].copy_from_slice(&raw);
        Some(I256::from_le_bytes(bytes))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from_signed_bytes_le(&self.to_le_bytes())
    }
    fn magnitude_bits(&self) -> u64 {
        256 - self.unsigned_abs().leading_zeros() as u64
    }
    fn double(&self) -> Self {
        *self << 1
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += *a * *b;
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= *a * *b;
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        (*self % *d == I256::ZERO).then(|| *self / *d)
    }
}

pub(crate) fn ceil_log2(v: u64) -> u64 {
    if v <= 1 {
        0
    } else {
        64 - (v - 1).leading_zeros() as u64
    }
}

fn max_bits(terms: &[(u64, &BigInt)]) -> u64 {
    terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
}

fn convert<C: Coeff>(terms: &[(u64, &BigInt)]) -> Option<Vec<(u64, C)>> {
    terms.iter().map(|&(i, c)| Some((i, C::from_big(c)?))).collect()
}

fn finish<C: Coeff>(terms: impl IntoIterator<Item = (u64, C)>) -> Vec<(u64, BigInt)> {
    terms.into_iter().filter(|(_, c)| !c.is_nil()).map(|(i, c)| (i, c.to_big())).collect()
}

/// Product of two indexed term lists. Indices must be relative to origins
/// whose sum is the box origin. With `b == None` the square of `a` is formed.
pub(crate) fn product(
    a: &[(u64, &BigInt)],
    b: Option<&[(u64, &BigInt)]>,
    bx: &BoxIndex,
    strategy: Strategy,
) -> Vec<(u64, BigInt)> {
    let len_b = b.map_or(a.len(), <[_]>::len);
    let bits_b = b.map_or_else(|| max_bits(a), max_bits);
    let growth = ceil_log2(a.len().min(len_b) as u64) + 2;
    let fits = max_bits(a) + bits_b + growth <= I256::CAPACITY_BITS;
    let width = match strategy.width {
        Some(Width::Fixed) if fits => Width::Fixed,
        Some(_) => Width::Big,
        None if fits => Width::Fixed,
        None => Width::Big,
    };
    let expected = (a.len() as u64).saturating_mul(len_b as u64);
    let layout = match strategy.layout {
        Some(Layout::Dense) if bx.size <= DENSE_LIMIT => Layout::Dense,
        Some(_) => Layout::Packed,
        None if bx.dense_ok(expected) => Layout::Dense,
        None => Layout::Packed,
    };
    match width {
        Width::Fixed => product_in::<I256>(a, b, bx, layout),
        Width::Big => product_in::<BigInt>(a, b, bx, layout),
    }
}

fn product_in<C: Coeff>(
    a: &[(u64, &BigInt)],
    b: Option<&[(u64, &BigInt)]>,
    bx: &BoxIndex,
    layout: Layout,
) -> Vec<(u64, BigInt)> {
    let a: Vec<(u64, C)> = convert(a).expect("width checked by caller");
    let b: Option<Vec<(u64, C)>> = b.map(|b| convert(b).expect("width checked by caller"));
    match layout {
        Layout::Dense => {
            let mut buf = vec![C::nil(); bx.size as usize];
            accumulate(&a, b.as_deref(), |idx, x, y| buf[idx as usize].add_mul(x, y));
            finish(buf.into_iter().enumerate().map(|(i, c)| (i as u64, c)))
        }
        Layout::Packed => {
            let mut map: FxHashMap<u64, C> = FxHashMap::default();
            accumulate(&a, b.as_deref(), |idx, x, y| map.entry(idx).or_insert_with(C::nil).add_mul(x, y));
            finish(map)
        }
    }
}

fn accumulate<C: Coeff>(a: &[(u64, C)], b: Option<&[(u64, C)]>, mut add: impl FnMut(u64, &C, &C)) {
    match b {
        Some(b) => {
            for (ia, ca) in a {
                for (ib, cb) in b {
                    add(ia + ib, ca, cb);
                }
            }
        }
        None => {
            for (pos, (ia, ca)) in a.iter().enumerate() {
                add(2 * ia, ca, ca);
                let twice = ca.double();
                for (ib, cb) in &a[pos + 1..] {
                    add(ia + ib, &twice, cb);
                }
            }
        }
    }
}

/// Where the quotient may live and how the divisor sits in the dividend's box.
pub(crate) struct DivisionFrame<'a> {
    pub bx: &'a BoxIndex,
    /// Origin used to index the divisor's terms.
    pub lo_d: &'a [i64],
    pub lo_q: &'a [i64],
    pub hi_q: &'a [i64],
}

/// Exact quotient by leading-term division. `p` is indexed against the box
/// origin and `d` against `frame.lo_d`. Returns quotient exponents and
/// coefficients.
pub(crate) fn quotient(
    p: &[(u64, &BigInt)],
    d: &[(u64, &BigInt)],
    frame: &DivisionFrame<'_>,
    strategy: Strategy,
) -> Result<Vec<(Vec<i32>, BigInt)>, LaurentError> {
    let expected = p.len() as u64;
    let layout = match strategy.layout {
        Some(Layout::Dense) if frame.bx.size <= DENSE_LIMIT => Layout::Dense,
        Some(_) => Layout::Packed,
        None if frame.bx.dense_ok(expected) => Layout::Dense,
        None => Layout::Packed,
    };
    if strategy.width != Some(Width::Big) {
        if let Some(q) = quotient_in::<I256>(p, d, frame, layout)? {
            return Ok(q);
        }
    }
    Ok(quotient_in::<BigInt>(p, d, frame, layout)?.expect("BigInt has no capacity bound"))
}

/// Remainder storage for division.
trait Remainder<C: Coeff> {
    /// Removes and returns the highest live index and its value.
    fn pop_top(&mut self) -> Option<(u64, C)>;
    fn sub_mul(&mut self, idx: u64, a: &C, b: &C);
}

struct DenseRemainder<C> {
    buf: Vec<C>,
    cursor: usize,
}

impl<C: Coeff> Remainder<C> for DenseRemainder<C> {
    fn pop_top(&mut self) -> Option<(u64, C)> {
        while self.cursor > 0 {
            self.cursor -= 1;
            let slot = &mut self.buf[self.cursor];
            if !slot.is_nil() {
                return Some((self.cursor as u64, std::mem::replace(slot, C::nil())));
            }
        }
        None
    }
    fn sub_mul(&mut self, idx: u64, a: &C, b: &C) {
        self.buf[idx as usize].sub_mul(a, b);
    }
}

struct PackedRemainder<C> {
    values: FxHashMap<u64, C>,
    heap: BinaryHeap<u64>,
}

impl<C: Coeff> Remainder<C> for PackedRemainder<C> {
    fn pop_top(&mut self) -> Option<(u64, C)> {
        while let Some(idx) = self.heap.pop() {
            if let Some(v) = self.values.remove(&idx) {
                if !v.is_nil() {
                    return Some((idx, v));
                }
            }
        }
        None
    }
    fn sub_mul(&mut self, idx: u64, a: &C, b: &C) {
        match self.values.get_mut(&idx) {
            Some(v) => v.sub_mul(a, b),
            None => {
                let mut v = C::nil();
                v.sub_mul(a, b);
                self.values.insert(idx, v);
                self.heap.push(idx);
            }
        }
    }
}

fn quotient_in<C: Coeff>(
    p: &[(u64, &BigInt)],
    d: &[(u64, &BigInt)],
    frame: &DivisionFrame<'_>,
    layout: Layout,
) -> Result<Option<Vec<(Vec<i32>, BigInt)>>, LaurentError> {
    let (Some(p), Some(mut d)) = (convert::<C>(p), convert::<C>(d)) else {
        return Ok(None);
    };
    match layout {
        Layout::Dense => {
            let mut buf = vec![C::nil(); frame.bx.size as usize];
            for (i, c) in p {
                buf[i as usize] = c;
            }
            let cursor = buf.len();
            divide(DenseRemainder { buf, cursor }, &mut d, frame)
        }
        Layout::Packed => {
            let heap = p.iter().map(|&(i, _)| i).collect();
            let values = p.into_iter().collect();
            divide(PackedRemainder { values, heap }, &mut d, frame)
        }
    }
}

fn divide<C: Coeff, R: Remainder<C>>(
    mut rem: R,
    d: &mut [(u64, C)],
    frame: &DivisionFrame<'_>,
) -> Result<Option<Vec<(Vec<i32>, BigInt)>>, LaurentError> {
    let bx = frame.bx;
    d.sort_unstable_by_key(|&(i, _)| std::cmp::Reverse(i));
    // An entry receives at most one update per divisor term.
    let d_bits = d.iter().map(|(_, c)| c.magnitude_bits()).max().unwrap_or(0);
    let headroom = C::CAPACITY_BITS.saturating_sub(d_bits + ceil_log2(d.len() as u64) + 2);
    let (lead_idx, lead_c) = d[0].clone();
    let mut lead_digits = vec![0i64; bx.lo.len()];
    bx.digits_into(lead_idx, &mut lead_digits);
    let mut digits = vec![0i64; bx.lo.len()];
    let mut out = Vec::new();
    while let Some((h, value)) = rem.pop_top() {
        if h < lead_idx {
            return Err(LaurentError::DivisionNotExact);
        }
        bx.digits_into(h, &mut digits);
        let mut exps = Vec::with_capacity(digits.len());
        for k in 0..digits.len() {
            let e = digits[k] + bx.lo[k] - (lead_digits[k] + frame.lo_d[k]);
            if e < frame.lo_q[k] || e > frame.hi_q[k] {
                return Err(LaurentError::DivisionNotExact);
            }
            exps.push(e as i32);
        }
        let qc = value.div_exact(&lead_c).ok_or(LaurentError::DivisionNotExact)?;
        if qc.magnitude_bits() > headroom {
            return Ok(None);
        }
        let q_idx = h - lead_idx;
        for (di, dc) in d.iter().skip(1) {
            rem.sub_mul(q_idx + di, &qc, dc);
        }
        out.push((exps, qc.to_big()));
    }
    Ok(Some(out))
}
