//! Predicates on masks: refinement, interpolatory, biorthogonality, accuracy
//! number, vanishing moments, and the mixed extension-principle conditions.
//! In exact mode every check is bit-exact; in float mode a per-coefficient
//! tolerance applies.

use crate::error::{Error, Result};
use crate::filter::{MultiIndex, ParityPoint};
use crate::mask::Mask;
use crate::scalar::{Coeff, ScalarValue};

/// Per-coefficient pass/fail tolerance for float-mode checks.
pub const FLOAT_TOL: f64 = 1e-10;

/// Default search cap for accuracy / vanishing-moment orders.
pub const DEFAULT_ORDER_CAP: u32 = 64;

/// Where a check first (maximally) deviates.
#[derive(Clone, Debug, PartialEq)]
pub enum CheckDetail {
    /// Offending filter coefficient index.
    Coefficient(MultiIndex),
    /// Offending evaluation point `pi * gamma`, with the coefficient index
    /// of the residual polynomial when applicable.
    AtParity {
        gamma: ParityPoint,
        index: Option<MultiIndex>,
    },
}

/// Outcome of an exactness check. In exact mode `pass` iff the residual is
/// identically zero; in float mode `pass` iff the residual is within
/// [`FLOAT_TOL`].
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub pass: bool,
    /// Maximum absolute deviation; exactly zero on an exact-mode pass.
    pub residual: ScalarValue,
    pub detail: Option<CheckDetail>,
}

/// Tracks the worst deviation seen, in filter-coefficient units.
struct Worst<C: Coeff> {
    value: Option<(C, f64)>,
    detail: Option<CheckDetail>,
}

impl<C: Coeff> Worst<C> {
    fn new() -> Self {
        Worst {
            value: None,
            detail: None,
        }
    }

    fn observe(&mut self, dev: &C, detail: CheckDetail) {
        if dev.is_zero() {
            return;
        }
        let mag = dev.to_f64().abs();
        let beats = match &self.value {
            None => true,
            Some((_, best)) => mag > *best,
        };
        if beats {
            self.value = Some((dev.clone(), mag));
            self.detail = Some(detail);
        }
    }

    fn any(&self) -> bool {
        self.value.is_some()
    }

    fn into_result(self) -> CheckResult {
        match self.value {
            None => CheckResult {
                pass: true,
                residual: C::zero().to_scalar(),
                detail: None,
            },
            Some((dev, mag)) => CheckResult {
                pass: !C::EXACT && mag <= FLOAT_TOL,
                residual: dev.to_scalar(),
                detail: self.detail,
            },
        }
    }
}

/// Checks the filter condition for an interpolatory mask: `h(0) = 1` and
/// `h(k) = 0` at every other even point.
pub fn is_interpolatory<C: Coeff>(m: &Mask<C>) -> CheckResult {
    let mut worst = Worst::new();
    let origin = MultiIndex::zero(m.dim());
    let center_dev = m.filter().get(&origin).sub(&C::one());
    worst.observe(&center_dev, CheckDetail::Coefficient(origin));
    for (idx, c) in m.filter().iter() {
        if idx.is_zero() {
            continue;
        }
        if idx.coords().iter().all(|&k| k % 2 == 0) {
            worst.observe(c, CheckDetail::Coefficient(idx.clone()));
        }
    }
    worst.into_result()
}

/// Biorthogonality of two refinement masks: `conj(a) * b` must be
/// interpolatory.
pub fn is_biorthogonal<C: Coeff>(a: &Mask<C>, b: &Mask<C>) -> Result<CheckResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let product = a.conjugate().multiply(b)?;
    Ok(is_interpolatory(&product))
}

/// Witness for a finite accuracy or vanishing-moment count: the first
/// derivative moment that fails to vanish.
#[derive(Clone, Debug)]
pub struct MomentWitness {
    pub gamma: ParityPoint,
    pub mu: Vec<u32>,
    pub value: ScalarValue,
}

/// Result of an accuracy-number search.
#[derive(Clone, Debug)]
pub struct AccuracyReport {
    /// Smallest order with a non-vanishing derivative moment at some nonzero
    /// parity point; equals the cap when `capped`.
    pub accuracy: u32,
    /// Present unless the cap was reached.
    pub witness: Option<MomentWitness>,
    pub capped: bool,
}

/// All compositions of `total` into `parts` non-negative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn first_nonvanishing_order<C: Coeff>(
    m: &Mask<C>,
    points: &[ParityPoint],
    cap: u32,
) -> Option<(u32, MomentWitness)> {
    let n = m.dim();
    for order in 0..cap {
        for mu in compositions(order, n) {
            for gamma in points {
                let v = m.derivative_moment(&mu, gamma);
                let nonzero = if C::EXACT {
                    !v.is_zero()
                } else {
                    v.to_f64().abs() > FLOAT_TOL
                };
                if nonzero {
                    return Some((
                        order,
                        MomentWitness {
                            gamma: gamma.clone(),
                            mu,
                            value: v.to_scalar(),
                        },
                    ));
                }
            }
        }
    }
    None
}

/// The accuracy number: the order of the zero of the mask at every nonzero
/// parity point, found as the smallest `|mu|` with a non-vanishing
/// derivative moment there. Requires a refinement mask.
pub fn accuracy_number<C: Coeff>(m: &Mask<C>, cap: u32) -> Result<AccuracyReport> {
    if !m.is_refinement(FLOAT_TOL) {
        return Err(Error::NotRefinement {
            sum: format!("{:?}", m.coeff_sum()),
            expected: format!("2^{}", m.dim()),
        });
    }
    let points = ParityPoint::nonzero(m.dim());
    Ok(match first_nonvanishing_order(m, &points, cap) {
        Some((order, witness)) => AccuracyReport {
            accuracy: order,
            witness: Some(witness),
            capped: false,
        },
        None => AccuracyReport {
            accuracy: cap,
            witness: None,
            capped: true,
        },
    })
}

/// Number of discrete vanishing moments: the order of the zero at the
/// origin. Errors if the cap is reached.
pub fn vanishing_moments<C: Coeff>(m: &Mask<C>, cap: u32) -> Result<u32> {
    let points = [ParityPoint::zero(m.dim())];
    match first_nonvanishing_order(m, &points, cap) {
        Some((order, _)) => Ok(order),
        None => Err(Error::CapReached(cap)),
    }
}

/// Verifies the mixed extension-principle conditions for combined masks:
/// for every `gamma` in `{0, pi}^n`,
/// `conj(tau(. + gamma)) taud + sum_j conj(t_j(. + gamma)) td_j` must equal
/// 1 for `gamma = 0` and 0 otherwise, coefficient by coefficient.
pub fn muep_verify<C: Coeff>(
    primal: (&Mask<C>, &[Mask<C>]),
    dual: (&Mask<C>, &[Mask<C>]),
) -> Result<CheckResult> {
    let (tau, wavelets) = primal;
    let (taud, duals) = dual;
    let n = tau.dim();
    if taud.dim() != n {
        return Err(Error::DimensionMismatch(n, taud.dim()));
    }
    if wavelets.len() != duals.len() {
        return Err(Error::Invalid(format!(
            "wavelet list lengths differ: {} vs {}",
            wavelets.len(),
            duals.len()
        )));
    }
    for m in wavelets.iter().chain(duals.iter()) {
        if m.dim() != n {
            return Err(Error::DimensionMismatch(n, m.dim()));
        }
    }

    let mut worst = Worst::new();
    for gamma in ParityPoint::all(n) {
        let mut lhs = tau.conjugate_translated(&gamma).multiply(taud)?;
        for (t, td) in wavelets.iter().zip(duals) {
            lhs = lhs.add(&t.conjugate_translated(&gamma).multiply(td)?)?;
        }
        let expected = if gamma.is_zero() {
            Mask::constant(C::one(), n)
        } else {
            Mask::zero(n)
        };
        let dev = lhs.sub(&expected)?;
        // deviations in Laurent-coefficient units
        let dev = dev.div_pow2(n as u32);
        for (idx, c) in dev.filter().iter() {
            worst.observe(
                c,
                CheckDetail::AtParity {
                    gamma: gamma.clone(),
                    index: Some(idx.clone()),
                },
            );
        }
        if C::EXACT && worst.any() {
            break;
        }
    }
    Ok(worst.into_result())
}
