//! Masks: Laurent trigonometric polynomials in the convention
//! `tau(w) = 2^{-n} sum_k h(k) e^{-i k.w}` with `h` a sparse real filter.
//!
//! All operations act on the Laurent polynomial, not the raw filter, so the
//! `2^{-n}` normalization is preserved throughout. Complex-valued masks such
//! as `e^{-i w.v} conj(U(w.v + pi))` are represented through their real
//! filters via shift, reflection and sign modulation.

use crate::error::{Error, Result};
use crate::filter::{Filter, MultiIndex, ParityPoint};
use crate::scalar::{Coeff, Dyadic, ScalarValue};

/// A mask over `Z^n` with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct Mask<C: Coeff> {
    filter: Filter<C>,
}

impl<C: Coeff> Mask<C> {
    pub fn from_filter(filter: Filter<C>) -> Self {
        Mask { filter }
    }

    /// 1-D mask from filter taps.
    pub fn univariate(taps: &[(i64, C)]) -> Self {
        Mask {
            filter: Filter::univariate(taps),
        }
    }

    pub fn filter(&self) -> &Filter<C> {
        &self.filter
    }

    pub fn into_filter(self) -> Filter<C> {
        self.filter
    }

    pub fn dim(&self) -> usize {
        self.filter.dim()
    }

    pub fn zero(dim: usize) -> Self {
        Mask {
            filter: Filter::new(dim),
        }
    }

    /// The constant mask `c`; its filter holds `2^n c` at the origin.
    pub fn constant(c: C, dim: usize) -> Self {
        let mut filter = Filter::new(dim);
        filter.accumulate(MultiIndex::zero(dim), c.mul_pow2(dim as u32));
        Mask { filter }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Mask {
            filter: self.filter.add(&other.filter)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&C::from_int(-1)))
    }

    pub fn scale(&self, c: &C) -> Self {
        Mask {
            filter: self.filter.scale(c),
        }
    }

    /// Multiply by `2^{-e}` (exact in both modes).
    pub fn div_pow2(&self, e: u32) -> Self {
        Mask {
            filter: self.filter.div_pow2(e),
        }
    }

    /// Laurent-polynomial product. The filters convolve with one extra
    /// `2^{-n}` so the result keeps the mask convention.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let conv = self.filter.convolve(&other.filter)?;
        Ok(Mask {
            filter: conv.div_pow2(self.dim() as u32),
        })
    }

    /// Complex conjugate; for real filters this reflects the index set.
    pub fn conjugate(&self) -> Self {
        Mask {
            filter: self.filter.reflect(),
        }
    }

    /// Multiply by `e^{-i w.v}`, i.e. translate the filter by `v`.
    pub fn shift(&self, v: &MultiIndex) -> Result<Self> {
        Ok(Mask {
            filter: self.filter.translate(v)?,
        })
    }

    /// Translate the argument by `pi * gamma`: returns `tau(. + pi gamma)`.
    pub fn modulate(&self, gamma: &ParityPoint) -> Self {
        Mask {
            filter: self.filter.modulate(gamma),
        }
    }

    /// `conj(tau(. + pi gamma))` in one step.
    pub fn conjugate_translated(&self, gamma: &ParityPoint) -> Self {
        self.conjugate().modulate(gamma)
    }

    /// The n-D mask `w -> R(w . v)` from a univariate mask `R`; its filter
    /// places `2^{n-1} H(K)` at `K v`.
    pub fn lift_along(r: &Mask<C>, v: &MultiIndex) -> Result<Self> {
        if r.dim() != 1 {
            return Err(Error::NotUnivariate(r.dim()));
        }
        if v.is_zero() {
            return Err(Error::ZeroDirection);
        }
        let dim = v.dim();
        let mut filter = Filter::new(dim);
        for (idx, c) in r.filter.iter() {
            let k = idx.coords()[0];
            filter.accumulate(v.scaled(k), c.mul_pow2(dim as u32 - 1));
        }
        Ok(Mask { filter })
    }

    /// Exact value of `tau(pi gamma) = 2^{-n} sum_k h(k) (-1)^{k.gamma}`.
    pub fn eval_parity(&self, gamma: &ParityPoint) -> C {
        assert_eq!(gamma.dim(), self.dim(), "parity point dimension mismatch");
        let mut acc = C::zero();
        for (idx, c) in self.filter.iter() {
            if gamma.odd_dot(idx) {
                acc = acc.sub(c);
            } else {
                acc = acc.add(c);
            }
        }
        acc.div_pow2(self.dim() as u32)
    }

    /// `2^{-n} sum_k h(k) k^mu (-1)^{k.gamma}`. The actual derivative
    /// `D^mu tau(pi gamma)` is `(-i)^{|mu|}` times this, so the value is zero
    /// exactly when the derivative vanishes.
    pub fn derivative_moment(&self, mu: &[u32], gamma: &ParityPoint) -> C {
        assert_eq!(mu.len(), self.dim(), "derivative order dimension mismatch");
        assert_eq!(gamma.dim(), self.dim(), "parity point dimension mismatch");
        let mut acc = C::zero();
        for (idx, c) in self.filter.iter() {
            let term = c.mul(&C::from_bigint(&idx.pow(mu)));
            if gamma.odd_dot(idx) {
                acc = acc.sub(&term);
            } else {
                acc = acc.add(&term);
            }
        }
        acc.div_pow2(self.dim() as u32)
    }

    /// Even/odd split of a univariate mask:
    /// `R = R^e + R^o` with `R^e = (R + R(. + pi)) / 2`.
    pub fn parity_parts(&self) -> Result<(Self, Self)> {
        if self.dim() != 1 {
            return Err(Error::NotUnivariate(self.dim()));
        }
        let mut even = Filter::new(1);
        let mut odd = Filter::new(1);
        for (idx, c) in self.filter.iter() {
            if idx.coords()[0].rem_euclid(2) == 0 {
                even.accumulate(idx.clone(), c.clone());
            } else {
                odd.accumulate(idx.clone(), c.clone());
            }
        }
        Ok((Mask { filter: even }, Mask { filter: odd }))
    }

    /// Sum of the filter coefficients, i.e. `2^n tau(0)`.
    pub fn coeff_sum(&self) -> C {
        self.filter.coeff_sum()
    }

    /// `tau(0) = 1`, checked exactly in exact mode and within `tol` in
    /// float mode.
    pub fn is_refinement(&self, tol: f64) -> bool {
        let sum = self.coeff_sum();
        let expected = C::one().mul_pow2(self.dim() as u32);
        if C::EXACT {
            sum == expected
        } else {
            (sum.to_f64() - expected.to_f64()).abs() <= tol * expected.to_f64()
        }
    }

    pub fn to_float(&self) -> Mask<f64> {
        Mask {
            filter: self.filter.to_float(),
        }
    }

    /// Diagnostic evaluation at an arbitrary frequency, in floating point.
    /// Returns `(re, im)`.
    pub fn eval_f64(&self, omega: &[f64]) -> (f64, f64) {
        assert_eq!(omega.len(), self.dim());
        let norm = f64::exp2(-(self.dim() as f64));
        let mut re = 0.0;
        let mut im = 0.0;
        for (idx, c) in self.filter.iter() {
            let phase: f64 = idx
                .coords()
                .iter()
                .zip(omega)
                .map(|(&k, &w)| -(k as f64) * w)
                .sum();
            let v = c.to_f64();
            re += v * phase.cos();
            im += v * phase.sin();
        }
        (re * norm, im * norm)
    }
}

impl Mask<Dyadic> {
    /// 1-D mask from dyadic taps `(index, num, exp2)`.
    pub fn univariate_dyadic(taps: &[(i64, i64, u32)]) -> Self {
        Mask::univariate(
            &taps
                .iter()
                .map(|&(i, n, e)| (i, Dyadic::ratio(n, e)))
                .collect::<Vec<_>>(),
        )
    }
}

/// A mask of either scalar kind, used at serialization and CLI boundaries.
/// Binary operations refuse to mix kinds.
#[derive(Clone, PartialEq, Debug)]
pub enum AnyMask {
    Exact(Mask<Dyadic>),
    Float(Mask<f64>),
}

impl AnyMask {
    pub fn dim(&self) -> usize {
        match self {
            AnyMask::Exact(m) => m.dim(),
            AnyMask::Float(m) => m.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMask::Exact(_))
    }

    pub fn support_len(&self) -> usize {
        match self {
            AnyMask::Exact(m) => m.filter().support_len(),
            AnyMask::Float(m) => m.filter().support_len(),
        }
    }

    pub fn to_float(&self) -> Mask<f64> {
        match self {
            AnyMask::Exact(m) => m.to_float(),
            AnyMask::Float(m) => m.clone(),
        }
    }

    pub fn eval_parity(&self, gamma: &ParityPoint) -> ScalarValue {
        match self {
            AnyMask::Exact(m) => m.eval_parity(gamma).to_scalar(),
            AnyMask::Float(m) => m.eval_parity(gamma).to_scalar(),
        }
    }

    /// Pairs off two masks of the same kind, or fails with `MixedKinds`.
    pub fn same_kind<'a>(
        &'a self,
        other: &'a AnyMask,
    ) -> Result<MaskPair<'a>> {
        match (self, other) {
            (AnyMask::Exact(a), AnyMask::Exact(b)) => Ok(MaskPair::Exact(a, b)),
            (AnyMask::Float(a), AnyMask::Float(b)) => Ok(MaskPair::Float(a, b)),
            _ => Err(Error::MixedKinds),
        }
    }
}

pub enum MaskPair<'a> {
    Exact(&'a Mask<Dyadic>, &'a Mask<Dyadic>),
    Float(&'a Mask<f64>, &'a Mask<f64>),
}
