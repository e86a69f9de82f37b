//! The separable fast transform: per level each axis is filtered against the
//! dual pair and downsampled (analysis), producing `2^n` subbands; synthesis
//! upsamples and filters against the primal pair in reverse axis order.

use super::{
    apply_tap, check_divisible, for_each_coord, half_shape, Grid, OpCounter, Pyramid,
};
use crate::error::{Error, Result};
use crate::filter::ParityPoint;
use crate::mask::Mask;
use crate::scalar::Coeff;
use crate::system::build_1d_system;

struct TensorKernel<C: Coeff> {
    /// analysis taps: dual refinement (low) and dual wavelet (high)
    ana_low: Vec<(i64, C)>,
    ana_high: Vec<(i64, C)>,
    /// synthesis taps: primal refinement (low) and primal wavelet (high)
    syn_low: Vec<(i64, C)>,
    syn_high: Vec<(i64, C)>,
}

fn taps<C: Coeff>(m: &Mask<C>) -> Vec<(i64, C)> {
    m.filter()
        .iter()
        .map(|(idx, c)| (idx.coords()[0], c.clone()))
        .collect()
}

impl<C: Coeff> TensorKernel<C> {
    /// Validates biorthogonality of `(s0, u0)` and derives the four
    /// univariate filter-tap tables.
    fn new(s0: &Mask<C>, u0: &Mask<C>) -> Result<Self> {
        let base = build_1d_system(s0, u0)?;
        Ok(TensorKernel {
            ana_low: taps(&base.taud),
            ana_high: taps(&base.duals[0].1),
            syn_low: taps(&base.tau),
            syn_high: taps(&base.wavelets[0].1),
        })
    }
}

/// One analysis pass along `axis`: each lane of length `s` becomes `s/2`
/// low-pass samples followed by `s/2` high-pass samples.
fn analyze_axis<C: Coeff>(
    y: &Grid<C>,
    axis: usize,
    kern: &TensorKernel<C>,
    counter: &mut OpCounter,
) -> Grid<C> {
    let shape = y.shape().to_vec();
    let size = shape[axis];
    let half = size / 2;
    let mut out = Grid::zeros(&shape);
    let mut ops = 0u64;

    let mut lane_shape = shape.clone();
    lane_shape[axis] = 1;
    let mut pos = vec![0i64; shape.len()];
    let mut coords = vec![0usize; shape.len()];
    for_each_coord(&lane_shape, |base| {
        pos.iter_mut().zip(base).for_each(|(p, &b)| *p = b as i64);
        coords.copy_from_slice(base);
        for k in 0..half {
            for (offset, taps_list) in [(0usize, &kern.ana_low), (half, &kern.ana_high)] {
                let mut acc = C::zero();
                for (m, c) in taps_list {
                    pos[axis] = (2 * k as i64 + m).rem_euclid(size as i64);
                    acc = acc.add(&apply_tap(c, y.get_periodic(&pos), &mut ops));
                }
                ops += 1; // the 1/2 normalization
                coords[axis] = offset + k;
                out.set(&coords, acc.div_pow2(1));
            }
        }
        pos[axis] = 0;
    });
    counter.add_ops(ops);
    out
}

/// One synthesis pass along `axis`, inverting [`analyze_axis`].
fn synthesize_axis<C: Coeff>(
    packed: &Grid<C>,
    axis: usize,
    kern: &TensorKernel<C>,
    counter: &mut OpCounter,
) -> Grid<C> {
    let shape = packed.shape().to_vec();
    let size = shape[axis];
    let half = size / 2;
    let mut out: Grid<C> = Grid::zeros(&shape);
    let mut ops = 0u64;

    let mut lane_shape = shape.clone();
    lane_shape[axis] = 1;
    let mut coords = vec![0usize; shape.len()];
    let mut target = vec![0usize; shape.len()];
    for_each_coord(&lane_shape, |base| {
        coords.copy_from_slice(base);
        target.copy_from_slice(base);
        for k in 0..half {
            for (offset, taps_list) in [(0usize, &kern.syn_low), (half, &kern.syn_high)] {
                coords[axis] = offset + k;
                let v = packed.get(&coords);
                for (m, c) in taps_list {
                    target[axis] = (2 * k as i64 + m).rem_euclid(size as i64) as usize;
                    let contrib = apply_tap(c, v, &mut ops);
                    let cur = out.get(&target).add(&contrib);
                    out.set(&target, cur);
                }
            }
        }
    });
    counter.add_ops(ops);
    out
}

/// Extracts the subband with high-pass axes marked by `v` from the packed
/// per-axis layout.
fn extract_band<C: Coeff>(packed: &Grid<C>, v: &ParityPoint) -> Grid<C> {
    let half = half_shape(packed.shape());
    let mut band = Grid::zeros(&half);
    let mut src = vec![0usize; packed.dim()];
    for_each_coord(&half, |k| {
        for i in 0..k.len() {
            src[i] = k[i] + v.bits()[i] as usize * half[i];
        }
        band.set(k, packed.get(&src).clone());
    });
    band
}

fn insert_band<C: Coeff>(packed: &mut Grid<C>, v: &ParityPoint, band: &Grid<C>) -> Result<()> {
    let half = half_shape(packed.shape());
    if band.shape() != half.as_slice() {
        return Err(Error::ShapeMismatch {
            expected: half,
            got: band.shape().to_vec(),
        });
    }
    let mut dst = vec![0usize; packed.dim()];
    for_each_coord(&half, |k| {
        for i in 0..k.len() {
            dst[i] = k[i] + v.bits()[i] as usize * half[i];
        }
        packed.set(&dst, band.get(k).clone());
    });
    Ok(())
}

/// Multilevel separable decomposition against the biorthogonal pair
/// `(s0, u0)`; analysis uses the dual side. Produces `2^n - 1` detail bands
/// per level and no auxiliary bands.
pub fn tensor_decompose<C: Coeff>(
    y: &Grid<C>,
    s0: &Mask<C>,
    u0: &Mask<C>,
    levels: u32,
    counter: &mut OpCounter,
) -> Result<Pyramid<C>> {
    let kern = TensorKernel::new(s0, u0)?;
    check_divisible(y.shape(), levels)?;
    counter.record_samples(y.len() as u64);

    let n = y.dim();
    let mut details = Vec::new();
    let mut cur = y.clone();
    for _ in 0..levels {
        let mut packed = cur;
        for axis in 0..n {
            packed = analyze_axis(&packed, axis, &kern, counter);
        }
        let bands: Vec<(ParityPoint, Grid<C>)> = ParityPoint::nonzero(n)
            .into_iter()
            .map(|v| {
                let band = extract_band(&packed, &v);
                (v, band)
            })
            .collect();
        details.push(bands);
        cur = extract_band(&packed, &ParityPoint::zero(n));
    }
    details.reverse();
    Ok(Pyramid {
        system_id: "tensor".into(),
        input_shape: y.shape().to_vec(),
        levels,
        coarse: cur,
        details,
        aux: Vec::new(),
    })
}

/// Inverts [`tensor_decompose`] given the same pair. Adds operations to the
/// counter without recording new samples.
pub fn tensor_reconstruct<C: Coeff>(
    p: &Pyramid<C>,
    s0: &Mask<C>,
    u0: &Mask<C>,
    counter: &mut OpCounter,
) -> Result<Grid<C>> {
    let kern = TensorKernel::new(s0, u0)?;
    if p.details.len() != p.levels as usize || !p.aux.is_empty() {
        return Err(Error::Invalid(
            "pyramid does not look like a separable decomposition".into(),
        ));
    }
    let n = p.dim();
    let mut cur = p.coarse.clone();
    for bands in &p.details {
        let full: Vec<usize> = cur.shape().iter().map(|&s| s * 2).collect();
        let mut packed = Grid::zeros(&full);
        insert_band(&mut packed, &ParityPoint::zero(n), &cur)?;
        for (v, band) in bands {
            insert_band(&mut packed, v, band)?;
        }
        for axis in (0..n).rev() {
            packed = synthesize_axis(&packed, axis, &kern, counter);
        }
        cur = packed;
    }
    if cur.shape() != p.input_shape.as_slice() {
        return Err(Error::ShapeMismatch {
            expected: p.input_shape.clone(),
            got: cur.shape().to_vec(),
        });
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::Dyadic;

    fn noise(shape: &[usize], seed: u64) -> Grid<Dyadic> {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let len: usize = shape.iter().product();
        let data = (0..len)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                Dyadic::ratio(((state >> 33) as i64 % 512) - 256, 8)
            })
            .collect();
        Grid::from_data(shape, data).unwrap()
    }

    #[test]
    fn haar_constant_grid_has_zero_details() {
        let h = catalog::haar();
        let y: Grid<Dyadic> = Grid::fill(&[8, 8], Dyadic::ratio(3, 1));
        let mut c = OpCounter::new();
        let p = tensor_decompose(&y, &h, &h, 2, &mut c).unwrap();
        for bands in &p.details {
            for (_, b) in bands {
                assert!(b.data().iter().all(|v| v.is_zero()));
            }
        }
        assert!(p.aux.is_empty());
        let back = tensor_reconstruct(&p, &h, &h, &mut c).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn haar_single_level_by_hand() {
        // 1-D Haar: low = (y0 + y1)/2, high = (y1 - y0)/2, then
        // reconstruction y0 = low - high, y1 = low + high
        let h = catalog::haar();
        let y = Grid::from_data(
            &[4],
            vec![
                Dyadic::from_int(1),
                Dyadic::from_int(3),
                Dyadic::from_int(5),
                Dyadic::from_int(1),
            ],
        )
        .unwrap();
        let mut c = OpCounter::new();
        let p = tensor_decompose(&y, &h, &h, 1, &mut c).unwrap();
        assert_eq!(p.coarse.data(), &[Dyadic::from_int(2), Dyadic::from_int(3)]);
        assert_eq!(
            p.details[0][0].1.data(),
            &[Dyadic::from_int(1), Dyadic::from_int(-2)]
        );
        let back = tensor_reconstruct(&p, &h, &h, &mut c).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn univariate_transform_matches_the_direct_filter_bank() {
        // independent oracle: apply the analysis formulas of the univariate
        // system directly
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        let sys = build_1d_system(&s, &u).unwrap();
        let y = noise(&[16], 9);
        let mut c = OpCounter::new();
        let p = tensor_decompose(&y, &s, &u, 1, &mut c).unwrap();

        for k in 0..8i64 {
            let mut low = Dyadic::zero();
            for (idx, hv) in sys.taud.filter().iter() {
                low = low.add(&hv.mul(y.get_periodic(&[2 * k + idx.coords()[0]])));
            }
            low = low.div_pow2(1);
            assert_eq!(p.coarse.get(&[k as usize]), &low);

            let mut high = Dyadic::zero();
            for (idx, hv) in sys.duals[0].1.filter().iter() {
                high = high.add(&hv.mul(y.get_periodic(&[2 * k + idx.coords()[0]])));
            }
            high = high.div_pow2(1);
            assert_eq!(p.details[0][0].1.get(&[k as usize]), &high);
        }
    }

    #[test]
    fn exact_round_trips() {
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        for shape in [vec![16usize, 16], vec![8, 8, 8]] {
            let y = noise(&shape, 23);
            let mut c = OpCounter::new();
            let p = tensor_decompose(&y, &s, &u, 2, &mut c).unwrap();
            assert_eq!(p.details[0].len(), (1 << shape.len()) - 1);
            let back = tensor_reconstruct(&p, &s, &u, &mut c).unwrap();
            assert_eq!(back, y);
        }
    }

    #[test]
    fn impulse_bands_reproduce_the_dual_system_masks() {
        // a single-level separable analysis of a unit impulse lays out the
        // dual-side masks: band_v(k) = 2^{-n} h_{dual mask for v}(-2k)
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        let sys = crate::system::build_tensor_system(&s, &u, 2).unwrap();

        let mut y: Grid<Dyadic> = Grid::zeros(&[16, 16]);
        y.set(&[0, 0], Dyadic::one());
        let mut c = OpCounter::new();
        let p = tensor_decompose(&y, &s, &u, 1, &mut c).unwrap();

        let scatter = |mask: &crate::mask::Mask<Dyadic>| -> Grid<Dyadic> {
            let mut g: Grid<Dyadic> = Grid::zeros(&[8, 8]);
            for (idx, coeff) in mask.filter().iter() {
                let co = idx.coords();
                if co.iter().any(|&v| v % 2 != 0) {
                    continue;
                }
                let k = [
                    (-co[0] / 2).rem_euclid(8) as usize,
                    (-co[1] / 2).rem_euclid(8) as usize,
                ];
                let cur = g.get(&k).add(&coeff.div_pow2(2));
                g.set(&k, cur);
            }
            g
        };

        assert_eq!(p.coarse, scatter(&sys.taud));
        for ((v, td), (vb, band)) in sys.duals.iter().zip(&p.details[0]) {
            assert_eq!(v, vb);
            assert_eq!(band, &scatter(td), "band {:?}", v);
        }
    }

    #[test]
    fn operation_counts_grow_linearly_with_dimension() {
        // one full single-level cycle with the 11-tap/5-tap pair costs
        // exactly (11 + 5) n operations per sample
        let s = catalog::dd_dual(2);
        let u = catalog::deslauriers_dubuc(2);
        for n in [1usize, 2, 3] {
            let y = noise(&vec![8; n], 3);
            let mut c = OpCounter::new();
            let p = tensor_decompose(&y, &s, &u, 1, &mut c).unwrap();
            tensor_reconstruct(&p, &s, &u, &mut c).unwrap();
            assert_eq!(c.ops(), 16 * n as u64 * 8u64.pow(n as u32), "n = {n}");
        }
    }

    #[test]
    fn asymmetric_pairs_are_allowed_here() {
        // the separable method has no symmetry requirement; daubechies-2 is
        // biorthogonal to itself and asymmetric
        let d = catalog::daubechies2();
        let y = noise(&[16, 16], 4).to_float();
        let mut c = OpCounter::new();
        let p = tensor_decompose(&y, &d, &d, 2, &mut c).unwrap();
        let back = tensor_reconstruct(&p, &d, &d, &mut c).unwrap();
        let max_err = y
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= 1e-12, "max error {max_err}");
    }

    #[test]
    fn non_biorthogonal_pairs_are_rejected() {
        let y: Grid<Dyadic> = Grid::zeros(&[8]);
        let mut c = OpCounter::new();
        assert!(matches!(
            tensor_decompose(&y, &catalog::haar(), &catalog::linear_spline(), 1, &mut c),
            Err(Error::NotBiorthogonal)
        ));
    }
}
