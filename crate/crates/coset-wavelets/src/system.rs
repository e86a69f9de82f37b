//! Combined biorthogonal mask systems: a refinement mask, its dual, and the
//! `2^n - 1` wavelet masks per side, verified against the mixed
//! extension-principle conditions.
//!
//! Three builders are provided: the classical univariate construction, the
//! separable tensor construction, and the coset sum construction whose dual
//! wavelet masks come from a Laplacian-pyramid-style scaffold in closed form.

use crate::analysis::{is_biorthogonal, is_interpolatory, muep_verify, CheckResult};
use crate::error::{Error, Result};
use crate::filter::{Filter, MultiIndex, ParityPoint};
use crate::mask::Mask;
use crate::scalar::Coeff;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SystemKind {
    Coset,
    Tensor,
    Univariate,
}

impl SystemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemKind::Coset => "coset",
            SystemKind::Tensor => "tensor",
            SystemKind::Univariate => "univariate",
        }
    }
}

/// Combined biorthogonal masks `(tau, (t_v))` and `(taud, (td_v))`, with the
/// wavelet maps keyed by the nonzero directions in lexicographic order.
#[derive(Clone, Debug)]
pub struct WaveletSystem<C: Coeff> {
    pub kind: SystemKind,
    pub tau: Mask<C>,
    pub taud: Mask<C>,
    pub wavelets: Vec<(ParityPoint, Mask<C>)>,
    pub duals: Vec<(ParityPoint, Mask<C>)>,
}

impl<C: Coeff> WaveletSystem<C> {
    pub fn dim(&self) -> usize {
        self.tau.dim()
    }

    pub fn wavelet_masks(&self) -> Vec<Mask<C>> {
        self.wavelets.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn dual_masks(&self) -> Vec<Mask<C>> {
        self.duals.iter().map(|(_, m)| m.clone()).collect()
    }

    /// Runs the extension-principle check on the stored masks.
    pub fn verify(&self) -> Result<CheckResult> {
        let w = self.wavelet_masks();
        let d = self.dual_masks();
        muep_verify((&self.tau, &w), (&self.taud, &d))
    }

    pub fn to_float(&self) -> WaveletSystem<f64> {
        WaveletSystem {
            kind: self.kind,
            tau: self.tau.to_float(),
            taud: self.taud.to_float(),
            wavelets: self
                .wavelets
                .iter()
                .map(|(v, m)| (v.clone(), m.to_float()))
                .collect(),
            duals: self
                .duals
                .iter()
                .map(|(v, m)| (v.clone(), m.to_float()))
                .collect(),
        }
    }
}

fn require_univariate<C: Coeff>(m: &Mask<C>) -> Result<()> {
    if m.dim() != 1 {
        return Err(Error::NotUnivariate(m.dim()));
    }
    Ok(())
}

fn require_biorthogonal<C: Coeff>(a: &Mask<C>, b: &Mask<C>) -> Result<()> {
    if !is_biorthogonal(a, b)?.pass {
        return Err(Error::NotBiorthogonal);
    }
    Ok(())
}

fn require_interpolatory<C: Coeff>(m: &Mask<C>) -> Result<()> {
    if !is_interpolatory(m).pass {
        return Err(Error::NotInterpolatory);
    }
    Ok(())
}

/// The standing assumption that a refinement mask has an accuracy number:
/// it must vanish at every nonzero parity point.
fn require_positive_accuracy<C: Coeff>(m: &Mask<C>) -> Result<()> {
    for gamma in ParityPoint::nonzero(m.dim()) {
        let v = m.eval_parity(&gamma);
        let ok = if C::EXACT {
            v.is_zero()
        } else {
            v.to_f64().abs() <= crate::analysis::FLOAT_TOL
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "refinement mask has no accuracy: nonzero value at pi*{}",
                gamma.key()
            )));
        }
    }
    Ok(())
}

/// The univariate wavelet construction `w -> e^{-iw} conj(X(w + pi))`.
pub fn univariate_wavelet<C: Coeff>(x: &Mask<C>) -> Result<Mask<C>> {
    require_univariate(x)?;
    let gamma = ParityPoint::new(vec![1]).expect("valid parity bits");
    x.modulate(&gamma)
        .conjugate()
        .shift(&MultiIndex::new(vec![1]))
}

/// The coset wavelet mask along direction `v`:
/// `w -> e^{-i w.v} conj(U(w.v + pi))`, supported on the line through `v`.
pub fn coset_wavelet<C: Coeff>(u: &Mask<C>, v: &ParityPoint) -> Result<Mask<C>> {
    require_univariate(u)?;
    if v.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let vi = v.as_index();
    // any single coordinate with v_i = 1 makes w.v pick up the pi shift
    let pivot = v.bits().iter().position(|&b| b == 1).unwrap();
    let mut bits = vec![0u8; v.dim()];
    bits[pivot] = 1;
    let gamma = ParityPoint::new(bits).expect("valid parity bits");
    Mask::lift_along(u, &vi)?
        .modulate(&gamma)
        .conjugate()
        .shift(&vi)
}

/// Builds the univariate combined masks from a biorthogonal pair
/// `(S0, U0)`: wavelets `S1 = e^{-iw} conj(U0(w+pi))` and
/// `U1 = e^{-iw} conj(S0(w+pi))`.
pub fn build_1d_system<C: Coeff>(s0: &Mask<C>, u0: &Mask<C>) -> Result<WaveletSystem<C>> {
    require_univariate(s0)?;
    require_univariate(u0)?;
    require_biorthogonal(s0, u0)?;
    require_positive_accuracy(s0)?;
    require_positive_accuracy(u0)?;
    let v = ParityPoint::new(vec![1]).expect("valid parity bits");
    Ok(WaveletSystem {
        kind: SystemKind::Univariate,
        tau: s0.clone(),
        taud: u0.clone(),
        wavelets: vec![(v.clone(), univariate_wavelet(u0)?)],
        duals: vec![(v, univariate_wavelet(s0)?)],
    })
}

/// Builds the separable system of dimension `n` from a biorthogonal pair:
/// refinement masks are tensor powers, and the wavelet for direction `v`
/// tensors `S_0`/`S_1` (resp. `U_0`/`U_1`) according to the bits of `v`.
pub fn build_tensor_system<C: Coeff>(
    s0: &Mask<C>,
    u0: &Mask<C>,
    n: usize,
) -> Result<WaveletSystem<C>> {
    let base = build_1d_system(s0, u0)?;
    let s1 = &base.wavelets[0].1;
    let u1 = &base.duals[0].1;
    if n == 1 {
        return Ok(base);
    }

    let pick = |bit: u8, low: &Mask<C>, high: &Mask<C>| {
        if bit == 0 {
            low.clone()
        } else {
            high.clone()
        }
    };

    let mut wavelets = Vec::new();
    let mut duals = Vec::new();
    for v in ParityPoint::nonzero(n) {
        let s_parts: Vec<_> = v.bits().iter().map(|&b| pick(b, s0, s1)).collect();
        let u_parts: Vec<_> = v.bits().iter().map(|&b| pick(b, u0, u1)).collect();
        wavelets.push((v.clone(), crate::construct::tensor_combine(&s_parts)?));
        duals.push((v, crate::construct::tensor_combine(&u_parts)?));
    }
    Ok(WaveletSystem {
        kind: SystemKind::Tensor,
        tau: crate::construct::tensor_power(s0, n)?,
        taud: crate::construct::tensor_power(u0, n)?,
        wavelets,
        duals,
    })
}

/// `e^{-i v.w} sum_gamma e^{-i v.gamma} conj(m(w + gamma))`, the folding
/// used to build the pyramid-scaffold masks.
fn folded_conjugate_sum<C: Coeff>(m: &Mask<C>, v: &ParityPoint) -> Result<Mask<C>> {
    let n = m.dim();
    let mut acc = Mask::zero(n);
    for gamma in ParityPoint::all(n) {
        let term = m.conjugate_translated(&gamma);
        acc = if v.odd_dot(&gamma.as_index()) {
            acc.sub(&term)?
        } else {
            acc.add(&term)?
        };
    }
    acc.shift(&v.as_index())
}

/// The trivial pyramid dual mask `2^{1-n} e^{-i v.w}` (constant for v = 0);
/// its filter is the single tap 2 at `v`.
fn pyramid_dual_mask<C: Coeff>(v: &ParityPoint, n: usize) -> Mask<C> {
    let mut f = Filter::new(n);
    f.accumulate(v.as_index(), C::from_int(2));
    Mask::from_filter(f)
}

/// Dual wavelet masks for a coset sum pair in closed form:
/// `td_v = -2^{1-n} g_v taud + 2^{1-n} e^{-i v.w}` with
/// `g_v = e^{-i v.w} sum_gamma e^{-i v.gamma} conj(tau(w + gamma))`.
/// Requires `taud` interpolatory and `(tau, taud)` biorthogonal.
pub fn compute_dual_wavelet_masks<C: Coeff>(
    tau: &Mask<C>,
    taud: &Mask<C>,
    wavelets: &[(ParityPoint, Mask<C>)],
) -> Result<Vec<(ParityPoint, Mask<C>)>> {
    let n = tau.dim();
    if taud.dim() != n {
        return Err(Error::DimensionMismatch(n, taud.dim()));
    }
    if wavelets.len() != (1 << n) - 1 {
        return Err(Error::Invalid(format!(
            "expected {} wavelet masks, got {}",
            (1 << n) - 1,
            wavelets.len()
        )));
    }
    require_interpolatory(taud)?;
    require_biorthogonal(tau, taud)?;

    let mut out = Vec::with_capacity(wavelets.len());
    for (v, _) in wavelets {
        let g = folded_conjugate_sum(tau, v)?;
        let correction = g
            .multiply(taud)?
            .scale(&C::from_int(-1))
            .div_pow2(n as u32 - 1);
        out.push((v.clone(), pyramid_dual_mask::<C>(v, n).add(&correction)?));
    }
    Ok(out)
}

/// Builds the coset sum wavelet system of dimension `n` from a biorthogonal
/// univariate pair `(S, U)` with `U` interpolatory: refinement masks are the
/// coset sums, wavelets are the directional masks of [`coset_wavelet`], and
/// duals come from [`compute_dual_wavelet_masks`].
pub fn build_coset_system<C: Coeff>(
    s: &Mask<C>,
    u: &Mask<C>,
    n: usize,
) -> Result<WaveletSystem<C>> {
    require_univariate(s)?;
    require_univariate(u)?;
    require_interpolatory(u)?;
    require_biorthogonal(s, u)?;
    require_positive_accuracy(s)?;

    let reps = crate::cosets::CosetReps::standard(n);
    let tau = crate::construct::coset_sum(s, &reps)?;
    let taud = crate::construct::coset_sum(u, &reps)?;
    let mut wavelets = Vec::new();
    for v in ParityPoint::nonzero(n) {
        let t = coset_wavelet(u, &v)?;
        wavelets.push((v, t));
    }
    let duals = compute_dual_wavelet_masks(&tau, &taud, &wavelets)?;
    Ok(WaveletSystem {
        kind: SystemKind::Coset,
        tau,
        taud,
        wavelets,
        duals,
    })
}

/// The Laplacian-pyramid-style scaffold behind the closed-form duals:
/// `t_0 = (1 - tau)/2`, folding masks `f_v` (from `taud`) and `g_v` (from
/// `tau`), the extended wavelet family over all of `{0,1}^n`, and the
/// trivial duals. Exposed for testing the algebra that lets the coset
/// reconstruction bypass the dual wavelet filters.
#[derive(Clone, Debug)]
pub struct PyramidScaffold<C: Coeff> {
    pub t0: Mask<C>,
    pub f: Vec<(ParityPoint, Mask<C>)>,
    pub g: Vec<(ParityPoint, Mask<C>)>,
    /// `tau_v` for every v in `{0,1}^n` (entry 0 is `t0`).
    pub pyramid_wavelets: Vec<(ParityPoint, Mask<C>)>,
    /// `taud_v = 2^{1-n} e^{-i v.w}` for every v.
    pub pyramid_duals: Vec<(ParityPoint, Mask<C>)>,
}

pub fn build_scaffold<C: Coeff>(
    tau: &Mask<C>,
    taud: &Mask<C>,
    wavelets: &[(ParityPoint, Mask<C>)],
) -> Result<PyramidScaffold<C>> {
    let n = tau.dim();
    let one = Mask::constant(C::one(), n);
    let t0 = one.sub(tau)?.div_pow2(1);

    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut pyramid_wavelets = vec![(ParityPoint::zero(n), t0.clone())];
    let mut pyramid_duals = vec![(
        ParityPoint::zero(n),
        pyramid_dual_mask::<C>(&ParityPoint::zero(n), n),
    )];
    for ((v, t), vv) in wavelets.iter().zip(ParityPoint::nonzero(n)) {
        debug_assert_eq!(*v, vv);
        let fv = folded_conjugate_sum(taud, v)?;
        let gv = folded_conjugate_sum(tau, v)?;
        pyramid_wavelets.push((v.clone(), t.add(&fv.multiply(&t0)?)?));
        pyramid_duals.push((v.clone(), pyramid_dual_mask::<C>(v, n)));
        f.push((v.clone(), fv));
        g.push((v.clone(), gv));
    }
    Ok(PyramidScaffold {
        t0,
        f,
        g,
        pyramid_wavelets,
        pyramid_duals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::vanishing_moments;
    use crate::catalog;
    use crate::scalar::Dyadic;

    fn dy(n: i64, e: u32) -> Dyadic {
        Dyadic::ratio(n, e)
    }

    fn idx(coords: &[i64]) -> MultiIndex {
        MultiIndex::new(coords.to_vec())
    }

    #[test]
    fn univariate_haar_wavelet() {
        let sys = build_1d_system(&catalog::haar(), &catalog::haar()).unwrap();
        let s1 = &sys.wavelets[0].1;
        assert_eq!(s1.filter().get(&idx(&[0])), dy(-1, 0));
        assert_eq!(s1.filter().get(&idx(&[1])), dy(1, 0));
        assert_eq!(s1.filter().support_len(), 2);
        assert!(sys.verify().unwrap().pass);
    }

    #[test]
    fn univariate_dd_pair_satisfies_the_extension_conditions() {
        let sys = build_1d_system(&catalog::dd_dual(2), &catalog::deslauriers_dubuc(2)).unwrap();
        assert!(sys.verify().unwrap().pass);
        // wavelet masks vanish at the origin
        for (_, t) in sys.wavelets.iter().chain(sys.duals.iter()) {
            assert!(t.eval_parity(&ParityPoint::zero(1)).is_zero());
        }
    }

    #[test]
    fn non_biorthogonal_input_is_rejected() {
        let err = build_1d_system(&catalog::haar(), &catalog::linear_spline());
        assert!(matches!(err, Err(Error::NotBiorthogonal)));
    }

    #[test]
    fn tensor_haar_wavelets_sit_on_the_unit_square() {
        let sys = build_tensor_system(&catalog::haar(), &catalog::haar(), 2).unwrap();
        assert_eq!(sys.wavelets.len(), 3);
        for (_, t) in &sys.wavelets {
            for (p, _) in t.filter().iter() {
                assert!(p.coords().iter().all(|&c| c == 0 || c == 1));
            }
            assert_eq!(t.filter().support_len(), 4);
        }
        assert!(sys.verify().unwrap().pass);
    }

    #[test]
    fn tensor_dd_system_verifies_exactly() {
        let sys =
            build_tensor_system(&catalog::dd_dual(2), &catalog::deslauriers_dubuc(2), 2).unwrap();
        assert!(sys.verify().unwrap().pass);
    }

    #[test]
    fn float_tensor_system_verifies_within_tolerance() {
        let d = catalog::daubechies2();
        let sys = build_tensor_system(&d, &d, 2).unwrap();
        let r = sys.verify().unwrap();
        assert!(r.pass);
        assert!(r.residual.to_f64().abs() <= 1e-12);
    }

    #[test]
    fn coset_wavelet_golden_taps() {
        // the 4-vanishing-moment wavelet profile (1/16, -9/16, 1, -9/16, 1/16)
        // at line positions (-2, 0, 1, 2, 4); the stored n-D filter carries
        // the extra 2^{n-1} placement factor of the lift
        let u4 = catalog::deslauriers_dubuc(2);
        let profile = [(-2, 1, 4), (0, -9, 4), (1, 1, 0), (2, -9, 4), (4, 1, 4)];

        for (bits, dir) in [
            (vec![1u8, 0], [1i64, 0]),
            (vec![0, 1], [0, 1]),
            (vec![1, 1], [1, 1]),
        ] {
            let v = ParityPoint::new(bits).unwrap();
            let t = coset_wavelet(&u4, &v).unwrap();
            assert_eq!(t.filter().support_len(), 5, "direction {:?}", dir);
            let line = t.filter().line_profile(&v.as_index()).unwrap().div_pow2(1);
            for (k, num, exp) in profile {
                let p = idx(&[k * dir[0], k * dir[1]]);
                assert_eq!(
                    t.filter().get(&p),
                    dy(num, exp).mul_pow2(1),
                    "tap {k} along {dir:?}"
                );
                assert_eq!(line.get(&idx(&[k])), dy(num, exp), "profile tap {k}");
            }
        }
    }

    #[test]
    fn coset_system_collapses_to_the_univariate_one() {
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        let coset = build_coset_system(&s, &u, 1).unwrap();
        let plain = build_1d_system(&s, &u).unwrap();
        assert_eq!(coset.tau, plain.tau);
        assert_eq!(coset.taud, plain.taud);
        assert_eq!(coset.wavelets[0].1, plain.wavelets[0].1);
        assert_eq!(coset.duals[0].1, plain.duals[0].1);
    }

    #[test]
    fn coset_systems_verify_exactly() {
        for (n, k) in [(2usize, 1u32), (2, 2), (3, 1)] {
            let sys =
                build_coset_system(&catalog::dd_dual(k), &catalog::deslauriers_dubuc(k), n)
                    .unwrap();
            let r = sys.verify().unwrap();
            assert!(r.pass, "(n, k) = ({n}, {k})");
        }
    }

    #[test]
    fn dual_masks_need_valid_preconditions() {
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        let sys = build_coset_system(&s, &u, 2).unwrap();
        // doubling tau breaks the biorthogonality precondition
        let doubled = sys.tau.scale(&Dyadic::from_int(2));
        assert!(compute_dual_wavelet_masks(&doubled, &sys.taud, &sys.wavelets).is_err());
        // a non-interpolatory dual refinement mask is rejected
        assert!(compute_dual_wavelet_masks(&sys.tau, &sys.tau, &sys.wavelets).is_err());
    }

    #[test]
    fn wavelets_have_the_expected_vanishing_moments() {
        for (n, k) in [(2usize, 1u32), (2, 2), (3, 1)] {
            let sys =
                build_coset_system(&catalog::dd_dual(k), &catalog::deslauriers_dubuc(k), n)
                    .unwrap();
            for (_, t) in sys.wavelets.iter().chain(sys.duals.iter()) {
                assert_eq!(vanishing_moments(t, 16).unwrap(), 2 * k, "(n,k)=({n},{k})");
            }
        }
    }

    #[test]
    fn coset_wavelets_live_on_direction_lines() {
        let sys =
            build_coset_system(&catalog::dd_dual(2), &catalog::deslauriers_dubuc(2), 3).unwrap();
        for (v, t) in &sys.wavelets {
            let vi = v.as_index();
            let profile = t.filter().line_profile(&vi).unwrap();
            assert_eq!(profile.support_len(), t.filter().support_len());
        }
    }

    #[test]
    fn scaffold_identities_hold_exactly() {
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        let sys = build_coset_system(&s, &u, 2).unwrap();
        let sc = build_scaffold(&sys.tau, &sys.taud, &sys.wavelets).unwrap();
        let n = 2u32;

        // folding identity: taud_0 + sum_v conj(f_v) taud_v = 2 taud
        let mut lhs = sc.pyramid_duals[0].1.clone();
        for ((v, fv), (vd, dualv)) in sc.f.iter().zip(&sc.pyramid_duals[1..]) {
            assert_eq!(v, vd);
            lhs = lhs.add(&fv.conjugate().multiply(dualv).unwrap()).unwrap();
        }
        let rhs = sys.taud.scale(&Dyadic::from_int(2));
        assert_eq!(lhs, rhs);

        // annihilation identity: t_0 + 2^{-n} sum_v t_v conj(g_v) = 0
        let mut lhs = sc.t0.clone();
        for ((v, gv), (vw, t)) in sc.g.iter().zip(&sys.wavelets) {
            assert_eq!(v, vw);
            lhs = lhs
                .add(&t.multiply(&gv.conjugate()).unwrap().div_pow2(n))
                .unwrap();
        }
        assert!(lhs.filter().is_zero());

        // f_v is pi-periodic
        for (_, fv) in &sc.f {
            for gamma in ParityPoint::all(2) {
                assert_eq!(&fv.modulate(&gamma), fv);
            }
        }

        // the full pyramid family (2^n masks a side) also satisfies the
        // extension conditions
        let w: Vec<_> = sc.pyramid_wavelets.iter().map(|(_, m)| m.clone()).collect();
        let d: Vec<_> = sc.pyramid_duals.iter().map(|(_, m)| m.clone()).collect();
        let r = muep_verify((&sys.tau, &w), (&sys.taud, &d)).unwrap();
        assert!(r.pass);
    }
}
