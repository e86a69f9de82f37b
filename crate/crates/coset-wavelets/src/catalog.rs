//! Generators for the univariate masks used throughout: Haar, the linear
//! spline, the Deslauriers-Dubuc interpolatory family with its duals, and
//! the order-2 Daubechies mask (float, used as a counterexample).

use crate::mask::Mask;
use crate::scalar::Dyadic;
use num_bigint::BigInt;

/// Haar refinement mask; filter `{0: 1, 1: 1}`.
pub fn haar() -> Mask<Dyadic> {
    Mask::univariate_dyadic(&[(0, 1, 0), (1, 1, 0)])
}

/// Piecewise-linear spline refinement mask; filter `{-1: 1/2, 0: 1, 1: 1/2}`.
pub fn linear_spline() -> Mask<Dyadic> {
    Mask::univariate_dyadic(&[(-1, 1, 1), (0, 1, 0), (1, 1, 1)])
}

/// `cos^2(w/2)` as a mask (equals the linear spline mask).
fn cos_sq() -> Mask<Dyadic> {
    linear_spline()
}

/// `sin^2(w/2)` as a mask; filter `{-1: -1/2, 0: 1, 1: -1/2}`.
fn sin_sq() -> Mask<Dyadic> {
    Mask::univariate_dyadic(&[(-1, -1, 1), (0, 1, 0), (1, -1, 1)])
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Internal product for catalog expansions. These have linear support in the
/// order, so the runaway-convolution cap does not apply to them.
fn mul(a: &Mask<Dyadic>, b: &Mask<Dyadic>) -> Mask<Dyadic> {
    let conv = a
        .filter()
        .convolve_capped(b.filter(), usize::MAX)
        .expect("univariate dimensions agree");
    Mask::from_filter(conv.div_pow2(1))
}

fn mask_pow(m: &Mask<Dyadic>, e: u32) -> Mask<Dyadic> {
    let mut acc = Mask::constant(Dyadic::one(), 1);
    for _ in 0..e {
        acc = mul(&acc, m);
    }
    acc
}

/// The interpolatory mask of order `2k`:
/// `cos^{2k}(w/2) P_k(sin^2(w/2))` with
/// `P_k(x) = sum_{j<k} binom(k-1+j, j) x^j`, expanded symbolically.
/// Has accuracy number `2k`. Panics if `k = 0`.
pub fn deslauriers_dubuc(k: u32) -> Mask<Dyadic> {
    assert!(k >= 1, "order parameter k must be at least 1");
    let x = sin_sq();
    // Horner evaluation of P_k at sin^2
    let coeff = |j: u32| Dyadic::new(binomial(k - 1 + j, j), 0);
    let mut p = Mask::constant(coeff(k - 1), 1);
    for j in (0..k - 1).rev() {
        p = mul(&p, &x)
            .add(&Mask::constant(coeff(j), 1))
            .expect("univariate polynomial expansion");
    }
    mul(&mask_pow(&cos_sq(), k), &p)
}

/// The dual of `deslauriers_dubuc(k)`: `U (3 - 2U)`, biorthogonal to `U`.
pub fn dd_dual(k: u32) -> Mask<Dyadic> {
    let u = deslauriers_dubuc(k);
    let three_minus_two_u = Mask::constant(Dyadic::from_int(3), 1)
        .sub(&u.scale(&Dyadic::from_int(2)))
        .expect("univariate combination");
    mul(&u, &three_minus_two_u)
}

/// Order-2 Daubechies refinement mask, in float mode:
/// `cos^2(w/2) ((1+sqrt(3))/2 + (1-sqrt(3))/2 e^{-iw})`, shifted so the four
/// taps sit at indices 0..3. Biorthogonal to itself, not interpolatory.
pub fn daubechies2() -> Mask<f64> {
    let s3 = 3f64.sqrt();
    let cos_sq_f: Mask<f64> = cos_sq().to_float();
    let factor = Mask::univariate(&[(0, 1.0 + s3), (1, 1.0 - s3)]);
    let conv = cos_sq_f
        .filter()
        .convolve_capped(factor.filter(), usize::MAX)
        .expect("univariate dimensions agree");
    Mask::from_filter(conv.div_pow2(1))
        .shift(&crate::filter::MultiIndex::new(vec![1]))
        .expect("univariate shift")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::MultiIndex;

    fn tap(m: &Mask<Dyadic>, i: i64) -> Dyadic {
        m.filter().get(&MultiIndex::new(vec![i]))
    }

    fn dy(n: i64, e: u32) -> Dyadic {
        Dyadic::ratio(n, e)
    }

    #[test]
    fn stated_filters() {
        assert_eq!(tap(&haar(), 0), Dyadic::one());
        assert_eq!(tap(&haar(), 1), Dyadic::one());
        assert_eq!(haar().filter().support_len(), 2);

        assert_eq!(tap(&linear_spline(), -1), dy(1, 1));
        assert_eq!(tap(&linear_spline(), 0), Dyadic::one());
        assert_eq!(tap(&linear_spline(), 1), dy(1, 1));

        assert_eq!(haar().coeff_sum(), dy(2, 0));
        assert_eq!(linear_spline().coeff_sum(), dy(2, 0));
    }

    #[test]
    fn order_two_is_the_linear_spline() {
        assert_eq!(deslauriers_dubuc(1), linear_spline());
    }

    #[test]
    fn order_four_golden_taps() {
        // (-1/16, 0, 9/16, 1, 9/16, 0, -1/16) at -3..3
        let u4 = deslauriers_dubuc(2);
        assert_eq!(tap(&u4, -3), dy(-1, 4));
        assert_eq!(tap(&u4, -2), Dyadic::zero());
        assert_eq!(tap(&u4, -1), dy(9, 4));
        assert_eq!(tap(&u4, 0), Dyadic::one());
        assert_eq!(tap(&u4, 1), dy(9, 4));
        assert_eq!(tap(&u4, 3), dy(-1, 4));
        assert_eq!(u4.filter().support_len(), 5);
    }

    #[test]
    fn dual_order_four_golden_taps() {
        // (-2, 0, 36, -32, -126, 288, 696, 288, -126, -32, 36, 0, -2)/512
        let s4 = dd_dual(2);
        let expected = [
            (-6, -2),
            (-5, 0),
            (-4, 36),
            (-3, -32),
            (-2, -126),
            (-1, 288),
            (0, 696),
            (1, 288),
            (2, -126),
            (3, -32),
            (4, 36),
            (5, 0),
            (6, -2),
        ];
        for (i, num) in expected {
            assert_eq!(tap(&s4, i), dy(num, 9), "tap {}", i);
        }
        assert_eq!(s4.filter().support_len(), 11);
    }

    #[test]
    fn dual_normalization_and_support() {
        for k in 1..=4 {
            let u = deslauriers_dubuc(k);
            let s = dd_dual(k);
            assert!(u.is_refinement(0.0));
            assert!(s.is_refinement(0.0));
            // beta = 2k + 1 nonzero taps for the interpolatory mask
            assert_eq!(u.filter().support_len(), 2 * k as usize + 1);
            // the dual spans -(4k-2)..(4k-2); for k >= 2 the outermost odd
            // taps vanish, leaving 6k - 1 nonzero entries
            let halfwidth = 4 * k as i64 - 2;
            assert_eq!(tap(&s, halfwidth), tap(&s, -halfwidth));
            assert!(!tap(&s, halfwidth).is_zero());
            let expected_nonzero = if k == 1 { 5 } else { 6 * k as usize - 1 };
            assert_eq!(s.filter().support_len(), expected_nonzero);
            assert!(s.filter().is_symmetric());
            assert!(u.filter().is_symmetric());
        }
    }

    #[test]
    fn dual_combination_stays_normalized() {
        // 3 - 2 U evaluated at the origin is 1
        use crate::filter::ParityPoint;
        let u4 = deslauriers_dubuc(2);
        let comb = Mask::constant(Dyadic::from_int(3), 1)
            .sub(&u4.scale(&Dyadic::from_int(2)))
            .unwrap();
        assert!(comb.eval_parity(&ParityPoint::zero(1)).is_one());
        // the interpolatory mask vanishes at pi
        let g1 = ParityPoint::new(vec![1]).unwrap();
        assert!(u4.modulate(&g1).eval_parity(&ParityPoint::zero(1)).is_zero());
    }

    #[test]
    fn even_part_of_interpolatory_masks_is_half() {
        let u4 = deslauriers_dubuc(2);
        let (even, odd) = u4.parity_parts().unwrap();
        assert_eq!(even, Mask::constant(Dyadic::ratio(1, 1), 1));
        assert_eq!(even.add(&odd).unwrap(), u4);

        let s4 = dd_dual(2);
        let (even, odd) = s4.parity_parts().unwrap();
        assert_eq!(even.add(&odd).unwrap(), s4);
    }

    #[test]
    fn daubechies2_taps() {
        let d = daubechies2();
        let s3 = 3f64.sqrt();
        let expected = [
            (0, (1.0 + s3) / 4.0),
            (1, (3.0 + s3) / 4.0),
            (2, (3.0 - s3) / 4.0),
            (3, (1.0 - s3) / 4.0),
        ];
        for (i, v) in expected {
            let got = d.filter().get(&MultiIndex::new(vec![i]));
            assert!((got - v).abs() < 1e-15, "tap {}: {} vs {}", i, got, v);
        }
        assert_eq!(d.filter().support_len(), 4);
        assert!((d.coeff_sum() - 2.0).abs() < 1e-12);
        // not interpolatory: the tap at the even index 2 is about 0.317
        assert!(d.filter().get(&MultiIndex::new(vec![2])).abs() > 0.3);
    }
}
