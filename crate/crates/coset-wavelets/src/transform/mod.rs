//! Fast multilevel wavelet transforms over periodic n-D grids, with
//! multiplicative-operation counting.
//!
//! Two methods are provided: the coset sum pyramid (coarse band from the
//! primal filter, essentially univariate detail bands, and auxiliary bands
//! that make reconstruction bypass the dual filters), and the classical
//! separable tensor transform for comparison.

mod coset;
mod tensor;

pub use coset::{coset_decompose, coset_reconstruct};
pub use tensor::{tensor_decompose, tensor_reconstruct};

use crate::error::{Error, Result};
use crate::filter::ParityPoint;
use crate::scalar::{Coeff, Dyadic};

/// Dense n-D array with periodic indexing, row-major storage.
#[derive(Clone, PartialEq, Debug)]
pub struct Grid<C: Coeff> {
    shape: Vec<usize>,
    data: Vec<C>,
}

impl<C: Coeff> Grid<C> {
    pub fn fill(shape: &[usize], value: C) -> Self {
        assert!(!shape.is_empty() && shape.iter().all(|&s| s >= 1));
        Grid {
            shape: shape.to_vec(),
            data: vec![value; shape.iter().product()],
        }
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Grid::fill(shape, C::zero())
    }

    pub fn from_data(shape: &[usize], data: Vec<C>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if shape.is_empty() || shape.iter().any(|&s| s < 1) {
            return Err(Error::Invalid("grid shape entries must be >= 1".into()));
        }
        if data.len() != expected {
            return Err(Error::Invalid(format!(
                "grid data length {} does not match shape {:?}",
                data.len(),
                shape
            )));
        }
        Ok(Grid {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C] {
        &mut self.data
    }

    fn flat(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.shape.len());
        let mut idx = 0;
        for (c, s) in coords.iter().zip(&self.shape) {
            debug_assert!(c < s);
            idx = idx * s + c;
        }
        idx
    }

    /// Value at a signed position, wrapped periodically along every axis.
    pub fn get_periodic(&self, pos: &[i64]) -> &C {
        debug_assert_eq!(pos.len(), self.shape.len());
        let mut idx = 0usize;
        for (p, s) in pos.iter().zip(&self.shape) {
            idx = idx * s + p.rem_euclid(*s as i64) as usize;
        }
        &self.data[idx]
    }

    pub fn get(&self, coords: &[usize]) -> &C {
        &self.data[self.flat(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: C) {
        let i = self.flat(coords);
        self.data[i] = value;
    }

    pub fn to_float(&self) -> Grid<f64> {
        Grid {
            shape: self.shape.clone(),
            data: self.data.iter().map(|c| c.to_f64()).collect(),
        }
    }
}

impl Grid<f64> {
    /// Exact dyadic copy of a float grid (every finite f64 is dyadic).
    pub fn to_exact(&self) -> Result<Grid<Dyadic>> {
        let data = self
            .data
            .iter()
            .map(|v| {
                Dyadic::from_f64_exact(*v)
                    .ok_or_else(|| Error::Invalid(format!("non-finite grid value {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid {
            shape: self.shape.clone(),
            data,
        })
    }
}

/// Iterates over all coordinate tuples of `shape` in row-major order.
pub(crate) fn for_each_coord(shape: &[usize], mut body: impl FnMut(&[usize])) {
    let mut coords = vec![0usize; shape.len()];
    loop {
        body(&coords);
        let mut axis = shape.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            coords[axis] += 1;
            if coords[axis] < shape[axis] {
                break;
            }
            coords[axis] = 0;
        }
    }
}

pub(crate) fn half_shape(shape: &[usize]) -> Vec<usize> {
    shape.iter().map(|&s| s / 2).collect()
}

pub(crate) fn check_divisible(shape: &[usize], levels: u32) -> Result<()> {
    for (axis, &size) in shape.iter().enumerate() {
        if levels > 0 && (levels >= usize::BITS || size % (1usize << levels) != 0) {
            return Err(Error::NotDivisible { axis, size, levels });
        }
    }
    Ok(())
}

/// Counter for multiplicative operations (multiplications and divisions).
/// Multiplications by exactly 1 are never executed and never counted;
/// normalizing divisions count one operation per halving.
#[derive(Clone, Debug, Default)]
pub struct OpCounter {
    muls: u64,
    samples: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter::default()
    }

    pub fn add_ops(&mut self, n: u64) {
        self.muls += n;
    }

    pub fn record_samples(&mut self, n: u64) {
        self.samples += n;
    }

    pub fn ops(&self) -> u64 {
        self.muls
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }
}

/// Mean multiplicative operations per input sample over everything the
/// counter has seen (conventionally one decompose + reconstruct cycle).
pub fn measured_complexity(counter: &OpCounter) -> Result<f64> {
    if counter.samples == 0 {
        return Err(Error::EmptyCounter);
    }
    Ok(counter.muls as f64 / counter.samples as f64)
}

/// Multiply-accumulate helper that skips (and does not count) unit taps.
pub(crate) fn apply_tap<C: Coeff>(tap: &C, value: &C, ops: &mut u64) -> C {
    if tap.is_one() {
        value.clone()
    } else {
        *ops += 1;
        tap.mul(value)
    }
}

/// Multilevel transform output: coarse band, per-level detail bands keyed by
/// direction, and (for the coset method) per-level auxiliary bands. Level 0
/// is the coarsest; the level-`j` bands have shape `input_shape / 2^{J-j}`.
#[derive(Clone, Debug)]
pub struct Pyramid<C: Coeff> {
    pub system_id: String,
    pub input_shape: Vec<usize>,
    pub levels: u32,
    pub coarse: Grid<C>,
    pub details: Vec<Vec<(ParityPoint, Grid<C>)>>,
    pub aux: Vec<Grid<C>>,
}

impl<C: Coeff> Pyramid<C> {
    pub fn dim(&self) -> usize {
        self.input_shape.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_indexing_wraps() {
        let g = Grid::from_data(&[2, 3], (0..6).map(|v| v as f64).collect()).unwrap();
        assert_eq!(*g.get_periodic(&[0, 0]), 0.0);
        assert_eq!(*g.get_periodic(&[1, 2]), 5.0);
        assert_eq!(*g.get_periodic(&[-1, -1]), 5.0);
        assert_eq!(*g.get_periodic(&[2, 3]), 0.0);
    }

    #[test]
    fn divisibility_guard() {
        assert!(check_divisible(&[8, 8], 3).is_ok());
        assert!(matches!(
            check_divisible(&[8, 12], 3),
            Err(Error::NotDivisible { axis: 1, .. })
        ));
    }

    #[test]
    fn complexity_needs_samples() {
        let mut c = OpCounter::new();
        assert!(matches!(measured_complexity(&c), Err(Error::EmptyCounter)));
        c.add_ops(10);
        c.record_samples(4);
        assert_eq!(measured_complexity(&c).unwrap(), 2.5);
    }
}
