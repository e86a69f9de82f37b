//! Sparse, finitely supported filters on `Z^n`.

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt;

/// A point of `Z^n`. Ordering is lexicographic, which fixes the canonical
/// entry order everywhere (serialization, witnesses, subband naming).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(coords: Vec<i64>) -> Self {
        MultiIndex(coords)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        MultiIndex(self.0.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `K * self`.
    pub fn scaled(&self, k: i64) -> Self {
        MultiIndex(self.0.iter().map(|&c| k * c).collect())
    }

    pub fn dot(&self, other: &Self) -> i64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    /// `k^mu = prod k_i^{mu_i}` as a big integer (moments can overflow i64).
    pub fn pow(&self, mu: &[u32]) -> BigInt {
        debug_assert_eq!(self.dim(), mu.len());
        let mut acc = BigInt::from(1);
        for (&k, &m) in self.0.iter().zip(mu) {
            acc *= BigInt::from(k).pow(m);
        }
        acc
    }

    /// Comma-joined coordinates, e.g. `1,0`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// An element gamma of `{0,1}^n`, standing for the evaluation point
/// `pi * gamma`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParityPoint(Vec<u8>);

impl ParityPoint {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Invalid(
                "parity point entries must be 0 or 1".into(),
            ));
        }
        Ok(ParityPoint(bits))
    }

    pub fn zero(dim: usize) -> Self {
        ParityPoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn as_index(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&b| b as i64).collect())
    }

    /// Parity of `k . gamma`; true means `(-1)^{k . gamma} = -1`.
    pub fn odd_dot(&self, k: &MultiIndex) -> bool {
        debug_assert_eq!(self.dim(), k.dim());
        self.0
            .iter()
            .zip(k.coords())
            .fold(0i64, |acc, (&b, &c)| acc + b as i64 * c)
            .rem_euclid(2)
            == 1
    }

    /// All of `{0,1}^n` in lexicographic order, starting at 0.
    pub fn all(dim: usize) -> Vec<ParityPoint> {
        assert!(dim >= 1 && dim < usize::BITS as usize);
        (0..1usize << dim)
            .map(|m| {
                ParityPoint(
                    (0..dim)
                        .map(|i| ((m >> (dim - 1 - i)) & 1) as u8)
                        .collect(),
                )
            })
            .collect()
    }

    /// The nonzero points, lexicographic.
    pub fn nonzero(dim: usize) -> Vec<ParityPoint> {
        Self::all(dim).into_iter().filter(|p| !p.is_zero()).collect()
    }

    pub fn key(&self) -> String {
        self.as_index().key()
    }
}

impl fmt::Debug for ParityPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi*({})", self.key())
    }
}

/// Default cap on filter support, overridable via `COSETSUM_MAX_SUPPORT`.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

pub fn support_cap() -> usize {
    std::env::var("COSETSUM_MAX_SUPPORT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SUPPORT_CAP)
}

/// Finitely supported map `Z^n -> C`. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Filter<C: Coeff> {
    dim: usize,
    entries: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> Filter<C> {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Filter {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut f = Filter::new(dim);
        for (idx, c) in entries {
            if idx.dim() != dim {
                return Err(Error::DimensionMismatch(dim, idx.dim()));
            }
            f.accumulate(idx, c);
        }
        Ok(f)
    }

    /// 1-D filter from `(index, coefficient)` pairs.
    pub fn univariate(taps: &[(i64, C)]) -> Self {
        let mut f = Filter::new(1);
        for (i, c) in taps {
            f.accumulate(MultiIndex::new(vec![*i]), c.clone());
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: &MultiIndex) -> C {
        self.entries.get(idx).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.entries.iter()
    }

    /// Adds `c` at `idx`, dropping the entry if the sum cancels to zero.
    pub fn accumulate(&mut self, idx: MultiIndex, c: C) {
        debug_assert_eq!(idx.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(cur) => {
                let sum = cur.add(&c);
                if sum.is_zero() {
                    self.entries.remove(&idx);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.entries.insert(idx, c);
            }
        }
    }

    pub fn coeff_sum(&self) -> C {
        self.entries
            .values()
            .fold(C::zero(), |acc, c| acc.add(c))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Filter<D> {
        let mut out = Filter::new(self.dim);
        for (idx, c) in &self.entries {
            out.accumulate(idx.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Filter<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|v| v.mul(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn div_pow2(&self, e: u32) -> Self {
        self.map(|v| v.div_pow2(e))
    }

    pub fn mul_pow2(&self, e: u32) -> Self {
        self.map(|v| v.mul_pow2(e))
    }

    /// `h(k) -> h(-k)`.
    pub fn reflect(&self) -> Self {
        let mut out = Filter::new(self.dim);
        for (idx, c) in &self.entries {
            out.accumulate(idx.neg(), c.clone());
        }
        out
    }

    /// `h(k) -> h(k - v)`.
    pub fn translate(&self, v: &MultiIndex) -> Result<Self> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.dim()));
        }
        let mut out = Filter::new(self.dim);
        for (idx, c) in &self.entries {
            out.accumulate(idx.add(v), c.clone());
        }
        Ok(out)
    }

    /// `h(k) -> h(k) * (-1)^{k . gamma}`.
    pub fn modulate(&self, gamma: &ParityPoint) -> Self {
        assert_eq!(gamma.dim(), self.dim, "parity point dimension mismatch");
        let mut out = Filter::new(self.dim);
        for (idx, c) in &self.entries {
            let c = if gamma.odd_dot(idx) { c.neg() } else { c.clone() };
            out.accumulate(idx.clone(), c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (idx, c) in &other.entries {
            out.accumulate(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_capped(other, support_cap())
    }

    pub fn convolve_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Filter::new(self.dim);
        for (ia, ca) in &self.entries {
            for (ib, cb) in &other.entries {
                out.accumulate(ia.add(ib), ca.mul(cb));
                if out.entries.len() > cap {
                    return Err(Error::SupportCapExceeded { cap });
                }
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries
            .iter()
            .all(|(idx, c)| self.get(&idx.neg()) == *c)
    }

    /// Taps along the line `{K v : K in Z}` as a 1-D filter in `K`, ignoring
    /// everything off the line. `v` must be nonzero.
    pub fn line_profile(&self, v: &MultiIndex) -> Result<Filter<C>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.dim()));
        }
        if v.is_zero() {
            return Err(Error::ZeroDirection);
        }
        // first nonzero coordinate of v recovers K
        let pivot = v.coords().iter().position(|&c| c != 0).unwrap();
        let mut out = Filter::new(1);
        for (idx, c) in &self.entries {
            let k = idx.coords()[pivot] / v.coords()[pivot];
            if idx == &v.scaled(k) {
                out.accumulate(MultiIndex::new(vec![k]), c.clone());
            }
        }
        Ok(out)
    }
}

impl<C: Coeff> fmt::Debug for Filter<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Filter(dim={}, {{", self.dim)?;
        for (i, (idx, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}: {:?}", idx, c)?;
        }
        write!(f, "}})")
    }
}
