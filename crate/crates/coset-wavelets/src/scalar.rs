//! Exact dyadic rational coefficients and the scalar abstraction shared by
//! exact and floating-point filters.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exact dyadic rational `num / 2^exp` with an arbitrary-precision numerator.
///
/// Reduced form: `num` is odd whenever `exp > 0`, and zero is stored as
/// `(0, 0)`. Exponents are non-negative, so even integers keep `exp = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.reduce();
        d
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && !self.num.bit(0) {
            self.num >>= 1;
            self.exp -= 1;
        }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic {
            num: BigInt::from(v),
            exp: 0,
        }
    }

    /// `num / 2^exp` from machine integers.
    pub fn ratio(num: i64, exp: u32) -> Self {
        Dyadic::new(BigInt::from(num), exp)
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.num == BigInt::from(1)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn add(&self, other: &Self) -> Self {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic::new(&self.num * &other.num, self.exp + other.exp)
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn div_pow2(&self, e: u32) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        Dyadic::new(self.num.clone(), self.exp + e)
    }

    pub fn mul_pow2(&self, e: u32) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let drop = e.min(self.exp);
        Dyadic {
            num: &self.num << (e - drop),
            exp: self.exp - drop,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Dyadic::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n * f64::exp2(-(self.exp as f64))
    }

    /// Exact conversion from a finite `f64` (every finite float is dyadic).
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, e2) = if biased == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let num = BigInt::from(sign) * BigInt::from(mantissa);
        if e2 >= 0 {
            Some(Dyadic::new(num << (e2 as u32), 0))
        } else {
            Some(Dyadic::new(num, (-e2) as u32))
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// A single coefficient at the serialization boundary: exact dyadic or a
/// 64-bit float. In-memory filters are homogeneous in one kind.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarValue {
    Exact(Dyadic),
    Approx(f64),
}

impl ScalarValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(d) => d.to_f64(),
            ScalarValue::Approx(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarValue::Exact(d) => d.is_zero(),
            ScalarValue::Approx(v) => *v == 0.0,
        }
    }
}

/// Coefficient ring used by filters: implemented by [`Dyadic`] (exact mode)
/// and `f64` (float mode). Operations on filters never mix the two.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True for exact (dyadic) arithmetic, false for floating point.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_pow2(&self, e: u32) -> Self;
    fn mul_pow2(&self, e: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn to_scalar(&self) -> ScalarValue;
}

impl Coeff for Dyadic {
    const EXACT: bool = true;

    fn zero() -> Self {
        Dyadic::zero()
    }
    fn one() -> Self {
        Dyadic::one()
    }
    fn from_int(v: i64) -> Self {
        Dyadic::from_int(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Dyadic::new(v.clone(), 0)
    }
    fn is_zero(&self) -> bool {
        Dyadic::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Dyadic::is_one(self)
    }
    fn add(&self, other: &Self) -> Self {
        Dyadic::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Dyadic::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Dyadic::mul(self, other)
    }
    fn neg(&self) -> Self {
        Dyadic::neg(self)
    }
    fn div_pow2(&self, e: u32) -> Self {
        Dyadic::div_pow2(self, e)
    }
    fn mul_pow2(&self, e: u32) -> Self {
        Dyadic::mul_pow2(self, e)
    }
    fn to_f64(&self) -> f64 {
        Dyadic::to_f64(self)
    }
    fn to_scalar(&self) -> ScalarValue {
        ScalarValue::Exact(self.clone())
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_one(&self) -> bool {
        *self == 1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_pow2(&self, e: u32) -> Self {
        self * f64::exp2(-(e as f64))
    }
    fn mul_pow2(&self, e: u32) -> Self {
        self * f64::exp2(e as f64)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_scalar(&self) -> ScalarValue {
        ScalarValue::Approx(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form() {
        let d = Dyadic::ratio(12, 3); // 12/8 = 3/2
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 1);

        // even integers stay at exp 0
        let four = Dyadic::ratio(8, 1);
        assert_eq!(four.numerator(), &BigInt::from(4));
        assert_eq!(four.exponent(), 0);

        let z = Dyadic::ratio(0, 7);
        assert!(z.is_zero());
        assert_eq!(z.exponent(), 0);
    }

    #[test]
    fn arithmetic() {
        let a = Dyadic::ratio(3, 2); // 3/4
        let b = Dyadic::ratio(1, 2); // 1/4
        assert_eq!(a.add(&b), Dyadic::one());
        assert_eq!(a.sub(&b), Dyadic::ratio(1, 1));
        assert_eq!(a.mul(&b), Dyadic::ratio(3, 4));
        assert_eq!(a.div_pow2(2), Dyadic::ratio(3, 4));
        assert_eq!(a.mul_pow2(3), Dyadic::from_int(6));
        assert_eq!(Dyadic::ratio(1064, 9).to_f64(), 1064.0 / 512.0);
    }

    #[test]
    fn float_roundtrip_is_exact() {
        for v in [0.0, 1.0, -0.75, 9.0 / 16.0, 1064.0 / 512.0, 3.5e-300] {
            let d = Dyadic::from_f64_exact(v).unwrap();
            assert_eq!(d.to_f64(), v);
        }
        assert!(Dyadic::from_f64_exact(f64::NAN).is_none());
        assert_eq!(
            Dyadic::from_f64_exact(0.5).unwrap(),
            Dyadic::ratio(1, 1)
        );
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::ratio(1, 1) < Dyadic::ratio(3, 2));
        assert!(Dyadic::ratio(-1, 0) < Dyadic::zero());
    }
}
