//! Liftable constructions: coset sum, tensor product, and hybrids of the two.

use crate::cosets::CosetReps;
use crate::error::{Error, Result};
use crate::filter::{Filter, MultiIndex};
use crate::mask::Mask;
use crate::scalar::Coeff;
use std::collections::BTreeSet;

/// Per-coefficient tolerance for float-mode refinement validation.
const REFINEMENT_TOL: f64 = 1e-10;

fn check_refinement<C: Coeff>(r: &Mask<C>) -> Result<()> {
    if !r.is_refinement(REFINEMENT_TOL) {
        return Err(Error::NotRefinement {
            sum: format!("{:?}", r.coeff_sum()),
            expected: format!("2^{}", r.dim()),
        });
    }
    Ok(())
}

/// Outcome of a coset sum construction.
#[derive(Clone, Debug)]
pub struct CosetSumOutput<C: Coeff> {
    pub mask: Mask<C>,
    /// True if two distinct summands placed mass at the same nonzero index.
    /// Never happens for valid representatives (distinct representatives are
    /// never parallel), but reported for diagnostics.
    pub collisions: bool,
}

/// The coset sum of a single univariate refinement mask over the given
/// representatives:
/// `2^{1-n} (1 - 2^{n-1} + sum_v R(w . v))` over the nonzero representatives.
pub fn coset_sum<C: Coeff>(r: &Mask<C>, reps: &CosetReps) -> Result<Mask<C>> {
    let masks = vec![r.clone(); reps.nonzero().len()];
    Ok(coset_sum_general(&masks, reps)?.mask)
}

/// Mixed-direction coset sum: one univariate refinement mask per nonzero
/// representative, in representative order.
pub fn coset_sum_general<C: Coeff>(
    masks: &[Mask<C>],
    reps: &CosetReps,
) -> Result<CosetSumOutput<C>> {
    let n = reps.dim();
    if masks.len() != reps.nonzero().len() {
        return Err(Error::Invalid(format!(
            "expected one univariate mask per nonzero representative ({}), got {}",
            reps.nonzero().len(),
            masks.len()
        )));
    }
    for m in masks {
        if m.dim() != 1 {
            return Err(Error::NotUnivariate(m.dim()));
        }
        check_refinement(m)?;
    }

    // detect coinciding nonzero placements before summing
    let mut seen = BTreeSet::new();
    let mut collisions = false;
    for (m, v) in masks.iter().zip(reps.nonzero()) {
        for (idx, _) in m.filter().iter() {
            let k = idx.coords()[0];
            if k != 0 && !seen.insert(v.scaled(k)) {
                collisions = true;
            }
        }
    }

    // 2^{1-n} (1 - 2^{n-1}) = 2^{1-n} - 1
    let constant = C::one().div_pow2(n as u32 - 1).sub(&C::one());
    let mut acc = Mask::constant(constant, n);
    for (m, v) in masks.iter().zip(reps.nonzero()) {
        let lifted = Mask::lift_along(m, v)?.div_pow2(n as u32 - 1);
        acc = acc.add(&lifted)?;
    }
    Ok(CosetSumOutput {
        mask: acc,
        collisions,
    })
}

/// Direct filter-domain form of the coset sum:
/// `h(0) = 2^n - (2^n - 1)(2 - H(0))`, `h(Kv) = H(K)` for `K != 0`.
/// Algebraically identical to [`coset_sum`]; kept as an independent route.
pub fn coset_sum_filter_form<C: Coeff>(r: &Mask<C>, reps: &CosetReps) -> Result<Mask<C>> {
    if r.dim() != 1 {
        return Err(Error::NotUnivariate(r.dim()));
    }
    check_refinement(r)?;
    let n = reps.dim();
    let mut out = Filter::new(n);
    let h0 = r.filter().get(&MultiIndex::new(vec![0]));
    // 2^n - (2^n - 1)(2 - H(0))
    let pow = C::one().mul_pow2(n as u32);
    let count = pow.sub(&C::one());
    let center = pow.sub(&count.mul(&C::from_int(2).sub(&h0)));
    out.accumulate(MultiIndex::zero(n), center);
    for v in reps.nonzero() {
        for (idx, c) in r.filter().iter() {
            let k = idx.coords()[0];
            if k != 0 {
                out.accumulate(v.scaled(k), c.clone());
            }
        }
    }
    Ok(Mask::from_filter(out))
}

/// The rearranged coset sum `2^{1-n} (1/2 + sum_v (R(w . v) - 1/2))`,
/// the form used for interpolatory input. Same affine combination as the
/// definition; kept as an independent route for equivalence tests.
pub fn coset_sum_centered_form<C: Coeff>(r: &Mask<C>, reps: &CosetReps) -> Result<Mask<C>> {
    if r.dim() != 1 {
        return Err(Error::NotUnivariate(r.dim()));
    }
    check_refinement(r)?;
    let n = reps.dim();
    let half = C::one().div_pow2(1);
    let mut acc = Mask::constant(half.clone(), n);
    let half_mask = Mask::constant(half, n);
    for v in reps.nonzero() {
        let lifted = Mask::lift_along(r, v)?;
        acc = acc.add(&lifted.sub(&half_mask)?)?;
    }
    Ok(acc.div_pow2(n as u32 - 1))
}

/// Tensor product of univariate refinement masks, one per coordinate:
/// the filter is `h(k) = H_1(k_1) ... H_n(k_n)`.
pub fn tensor_product<C: Coeff>(masks: &[Mask<C>]) -> Result<Mask<C>> {
    if masks.is_empty() {
        return Err(Error::Invalid("tensor product of an empty list".into()));
    }
    for m in masks {
        if m.dim() != 1 {
            return Err(Error::NotUnivariate(m.dim()));
        }
        check_refinement(m)?;
    }
    tensor_combine(masks)
}

/// `n` copies of the same univariate mask.
pub fn tensor_power<C: Coeff>(r: &Mask<C>, n: usize) -> Result<Mask<C>> {
    tensor_product(&vec![r.clone(); n])
}

/// Joins masks on disjoint coordinate blocks into one mask on the
/// concatenated coordinates; the filter is the outer product of the block
/// filters. Does not require refinement normalization.
pub fn tensor_combine<C: Coeff>(blocks: &[Mask<C>]) -> Result<Mask<C>> {
    if blocks.is_empty() {
        return Err(Error::Invalid("tensor combine of an empty list".into()));
    }
    let cap = crate::filter::support_cap();
    let mut acc: Filter<C> = blocks[0].filter().clone();
    for b in &blocks[1..] {
        let dim = acc.dim() + b.dim();
        if acc
            .support_len()
            .checked_mul(b.filter().support_len())
            .is_none_or(|s| s > cap)
        {
            return Err(Error::SupportCapExceeded { cap });
        }
        let mut next = Filter::new(dim);
        for (ia, ca) in acc.iter() {
            for (ib, cb) in b.filter().iter() {
                let mut coords = ia.coords().to_vec();
                coords.extend_from_slice(ib.coords());
                next.accumulate(MultiIndex::new(coords), ca.mul(cb));
            }
        }
        acc = next;
    }
    Ok(Mask::from_filter(acc))
}

/// Which liftable operator a hybrid block applies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockOp {
    CosetSum,
    Tensor,
}

/// One factor of a hybrid construction: an operator applied to a univariate
/// refinement mask over `dim` coordinates.
#[derive(Clone, Debug)]
pub struct HybridBlock<C: Coeff> {
    pub op: BlockOp,
    pub mask: Mask<C>,
    pub dim: usize,
}

/// Product of per-block liftable constructions over disjoint coordinate
/// groups; the result lives on the sum of the block dimensions.
pub fn hybrid<C: Coeff>(blocks: &[HybridBlock<C>]) -> Result<Mask<C>> {
    if blocks.is_empty() {
        return Err(Error::Invalid("hybrid of an empty list".into()));
    }
    let mut factors = Vec::with_capacity(blocks.len());
    for b in blocks {
        if b.dim == 0 {
            return Err(Error::Invalid("hybrid block of dimension 0".into()));
        }
        let factor = match b.op {
            BlockOp::CosetSum => coset_sum(&b.mask, &CosetReps::standard(b.dim))?,
            BlockOp::Tensor => tensor_power(&b.mask, b.dim)?,
        };
        factors.push(factor);
    }
    tensor_combine(&factors)
}
