//! Complete sets of representatives of `Z^n / 2Z^n`.

use crate::error::{Error, Result};
use crate::filter::MultiIndex;
use std::collections::BTreeSet;

/// An ordered set of `2^n` coset representatives containing 0 first.
#[derive(Clone, PartialEq, Debug)]
pub struct CosetReps {
    dim: usize,
    reps: Vec<MultiIndex>,
}

impl CosetReps {
    /// The standard representatives `{0,1}^n`, lexicographic.
    pub fn standard(dim: usize) -> Self {
        assert!(dim >= 1 && dim < usize::BITS as usize);
        let reps = (0..1usize << dim)
            .map(|m| {
                MultiIndex::new(
                    (0..dim)
                        .map(|i| ((m >> (dim - 1 - i)) & 1) as i64)
                        .collect(),
                )
            })
            .collect();
        CosetReps { dim, reps }
    }

    pub fn new(dim: usize, reps: Vec<MultiIndex>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidCosetReps("dimension must be >= 1".into()));
        }
        if reps.len() != 1usize << dim {
            return Err(Error::InvalidCosetReps(format!(
                "expected {} representatives, got {}",
                1usize << dim,
                reps.len()
            )));
        }
        if !reps[0].is_zero() {
            return Err(Error::InvalidCosetReps(
                "the first representative must be 0".into(),
            ));
        }
        let mut classes = BTreeSet::new();
        for r in &reps {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch(dim, r.dim()));
            }
            let class: Vec<i64> = r.coords().iter().map(|c| c.rem_euclid(2)).collect();
            if !classes.insert(class) {
                return Err(Error::InvalidCosetReps(format!(
                    "representatives {:?} are congruent modulo 2Z^n",
                    r
                )));
            }
        }
        Ok(CosetReps { dim, reps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reps(&self) -> &[MultiIndex] {
        &self.reps
    }

    /// The nonzero representatives (the set usually written Gamma').
    pub fn nonzero(&self) -> &[MultiIndex] {
        &self.reps[1..]
    }

    pub fn is_standard(&self) -> bool {
        *self == CosetReps::standard(self.dim)
    }
}
