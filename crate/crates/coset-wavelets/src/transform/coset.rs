//! The fast coset sum pyramid: per level, the coarse band is an analysis
//! pass with the coset sum of the primal filter `G`, each detail band is a
//! univariate prediction residual along its direction with the interpolatory
//! filter `H`, and an auxiliary band stores the even-point residual so the
//! reconstruction can bypass the dual filters entirely.

use super::{
    apply_tap, check_divisible, for_each_coord, half_shape, Grid, OpCounter, Pyramid,
};
use crate::analysis::is_interpolatory;
use crate::error::{Error, Result};
use crate::filter::ParityPoint;
use crate::mask::Mask;
use crate::scalar::Coeff;

/// Tap tables extracted from the univariate pair, validated once per run.
struct CosetKernel<C: Coeff> {
    /// `G(L)` for `L != 0`.
    g_side: Vec<(i64, C)>,
    /// `H(m)` for odd `m` (everything except the interpolatory center).
    h_odd: Vec<(i64, C)>,
    /// `a_G = -2^n + 2 + (2^n - 1) G(0)`.
    a_g: C,
    dirs: Vec<Vec<i64>>,
}

impl<C: Coeff> CosetKernel<C> {
    fn new(g: &Mask<C>, h: &Mask<C>, dim: usize) -> Result<Self> {
        if g.dim() != 1 {
            return Err(Error::NotUnivariate(g.dim()));
        }
        if h.dim() != 1 {
            return Err(Error::NotUnivariate(h.dim()));
        }
        if !g.filter().is_symmetric() || !h.filter().is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !is_interpolatory(h).pass {
            return Err(Error::NotInterpolatory);
        }

        let mut g_side = Vec::new();
        let mut g0 = C::zero();
        for (idx, c) in g.filter().iter() {
            let l = idx.coords()[0];
            if l == 0 {
                g0 = c.clone();
            } else {
                g_side.push((l, c.clone()));
            }
        }
        let h_odd: Vec<(i64, C)> = h
            .filter()
            .iter()
            .filter(|(idx, _)| idx.coords()[0] % 2 != 0)
            .map(|(idx, c)| (idx.coords()[0], c.clone()))
            .collect();

        let pow = 1i64 << dim;
        let a_g = C::from_int(2 - pow).add(&C::from_int(pow - 1).mul(&g0));
        let dirs = ParityPoint::nonzero(dim)
            .iter()
            .map(|v| v.as_index().coords().to_vec())
            .collect();
        Ok(CosetKernel {
            g_side,
            h_odd,
            a_g,
            dirs,
        })
    }
}

type DetailBands<C> = Vec<(ParityPoint, Grid<C>)>;

fn level_decompose<C: Coeff>(
    y: &Grid<C>,
    kern: &CosetKernel<C>,
    counter: &mut OpCounter,
) -> (Grid<C>, DetailBands<C>, Grid<C>) {
    let n = y.dim();
    let half = half_shape(y.shape());
    let mut coarse = Grid::zeros(&half);
    let mut aux = Grid::zeros(&half);
    let mut details: DetailBands<C> = ParityPoint::nonzero(n)
        .into_iter()
        .map(|v| (v, Grid::zeros(&half)))
        .collect();

    let mut ops = 0u64;
    let mut pos = vec![0i64; n];

    // coarse band: a_G y(2k) + sum over directions and side taps, then 2^{-n}
    for_each_coord(&half, |k| {
        for i in 0..n {
            pos[i] = 2 * k[i] as i64;
        }
        let center = y.get_periodic(&pos);
        let mut acc = apply_tap(&kern.a_g, center, &mut ops);
        for d in &kern.dirs {
            for (l, c) in &kern.g_side {
                for i in 0..n {
                    pos[i] = 2 * k[i] as i64 + l * d[i];
                }
                acc = acc.add(&apply_tap(c, y.get_periodic(&pos), &mut ops));
            }
        }
        ops += n as u64; // the 2^{-n} normalization, one halving per axis
        coarse.set(k, acc.div_pow2(n as u32));
    });

    // detail bands: prediction residual along each direction, halved
    for (v, band) in details.iter_mut() {
        let d = v.as_index().coords().to_vec();
        for_each_coord(&half, |k| {
            for i in 0..n {
                pos[i] = 2 * k[i] as i64 + d[i];
            }
            let mut acc = y.get_periodic(&pos).clone();
            for (m, c) in &kern.h_odd {
                for i in 0..n {
                    pos[i] = 2 * k[i] as i64 + (1 - m) * d[i];
                }
                acc = acc.sub(&apply_tap(c, y.get_periodic(&pos), &mut ops));
            }
            ops += 1; // the final halving
            band.set(k, acc.div_pow2(1));
        });
    }

    // auxiliary band: even-point residual, no multiplications
    for_each_coord(&half, |k| {
        for i in 0..n {
            pos[i] = 2 * k[i] as i64;
        }
        aux.set(k, y.get_periodic(&pos).sub(coarse.get(k)));
    });

    counter.add_ops(ops);
    (coarse, details, aux)
}

/// Multilevel decomposition with the coset sum filter pair: `g` is the
/// univariate primal mask (symmetric), `h` the univariate interpolatory dual
/// mask (symmetric). Every axis must be divisible by `2^levels`. Records the
/// input sample count on the counter.
pub fn coset_decompose<C: Coeff>(
    y: &Grid<C>,
    g: &Mask<C>,
    h: &Mask<C>,
    levels: u32,
    counter: &mut OpCounter,
) -> Result<Pyramid<C>> {
    let kern = CosetKernel::new(g, h, y.dim())?;
    check_divisible(y.shape(), levels)?;
    counter.record_samples(y.len() as u64);

    let mut details = Vec::new();
    let mut aux = Vec::new();
    let mut cur = y.clone();
    for _ in 0..levels {
        let (coarse, bands, a) = level_decompose(&cur, &kern, counter);
        details.push(bands);
        aux.push(a);
        cur = coarse;
    }
    details.reverse();
    aux.reverse();
    Ok(Pyramid {
        system_id: "coset".into(),
        input_shape: y.shape().to_vec(),
        levels,
        coarse: cur,
        details,
        aux,
    })
}

fn level_reconstruct<C: Coeff>(
    coarse: &Grid<C>,
    details: &[(ParityPoint, Grid<C>)],
    aux: &Grid<C>,
    kern: &CosetKernel<C>,
    counter: &mut OpCounter,
) -> Result<Grid<C>> {
    let n = coarse.dim();
    let half = coarse.shape().to_vec();
    if aux.shape() != half.as_slice() {
        return Err(Error::ShapeMismatch {
            expected: half.clone(),
            got: aux.shape().to_vec(),
        });
    }
    let full: Vec<usize> = half.iter().map(|&s| s * 2).collect();
    let mut out = Grid::zeros(&full);
    let mut ops = 0u64;
    let mut pos = vec![0i64; n];
    let mut even = vec![0usize; n];

    // even points first: coarse + auxiliary residual
    for_each_coord(&half, |k| {
        for i in 0..n {
            even[i] = 2 * k[i];
        }
        out.set(&even, coarse.get(k).add(aux.get(k)));
    });

    // odd-offset points per direction: doubled detail plus the univariate
    // prediction from already-written even points
    let two = C::from_int(2);
    let mut target = vec![0usize; n];
    for (v, band) in details {
        if band.shape() != half.as_slice() {
            return Err(Error::ShapeMismatch {
                expected: half.clone(),
                got: band.shape().to_vec(),
            });
        }
        let d = v.as_index().coords().to_vec();
        for_each_coord(&half, |k| {
            let mut acc = apply_tap(&two, band.get(k), &mut ops);
            for (m, c) in &kern.h_odd {
                for i in 0..n {
                    pos[i] = 2 * k[i] as i64 + (1 - m) * d[i];
                }
                acc = acc.add(&apply_tap(c, out.get_periodic(&pos), &mut ops));
            }
            // 2k + v stays inside the full grid, no wrap needed
            for i in 0..n {
                target[i] = 2 * k[i] + d[i] as usize;
            }
            out.set(&target, acc);
        });
    }

    counter.add_ops(ops);
    Ok(out)
}

/// Inverts [`coset_decompose`] exactly (bit-identically in exact mode) given
/// the same interpolatory mask `h`. Adds operations to the counter without
/// recording new samples, so a shared counter measures one full cycle.
pub fn coset_reconstruct<C: Coeff>(
    p: &Pyramid<C>,
    h: &Mask<C>,
    counter: &mut OpCounter,
) -> Result<Grid<C>> {
    // the primal filter is not used by reconstruction; the kernel is built
    // only to validate `h` and cache its odd taps
    let placeholder_g = Mask::constant(C::one(), 1);
    let kern = CosetKernel::new(&placeholder_g, h, p.dim())?;
    if p.details.len() != p.levels as usize || p.aux.len() != p.levels as usize {
        return Err(Error::Invalid(format!(
            "pyramid bands inconsistent with {} levels",
            p.levels
        )));
    }
    let mut cur = p.coarse.clone();
    for (bands, aux) in p.details.iter().zip(&p.aux) {
        cur = level_reconstruct(&cur, bands, aux, &kern, counter)?;
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
    use crate::construct::coset_sum;
    use crate::cosets::CosetReps;
    use crate::filter::MultiIndex;
    use crate::scalar::Dyadic;
    use crate::system::{build_coset_system, build_scaffold};

    fn dd_pair() -> (Mask<Dyadic>, Mask<Dyadic>) {
        (catalog::dd_dual(2), catalog::deslauriers_dubuc(2))
    }

    fn dyadic_noise(shape: &[usize], seed: u64) -> Grid<Dyadic> {
        // small deterministic LCG over dyadics with 8 fractional bits
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
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
    fn constant_grid_has_zero_bands() {
        let (s, u) = dd_pair();
        let y: Grid<Dyadic> = Grid::fill(&[8, 8], Dyadic::ratio(7, 2));
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 2, &mut c).unwrap();
        for bands in &p.details {
            for (_, b) in bands {
                assert!(b.data().iter().all(|v| v.is_zero()));
            }
        }
        for a in &p.aux {
            assert!(a.data().iter().all(|v| v.is_zero()));
        }
        assert!(p.coarse.data().iter().all(|v| *v == Dyadic::ratio(7, 2)));
    }

    #[test]
    fn zero_levels_is_the_identity() {
        let (s, u) = dd_pair();
        let y = dyadic_noise(&[4, 4], 3);
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 0, &mut c).unwrap();
        assert_eq!(p.coarse, y);
        assert!(p.details.is_empty());
        assert_eq!(coset_reconstruct(&p, &u, &mut c).unwrap(), y);
    }

    #[test]
    fn exact_round_trip_is_bit_identical() {
        let (s, u) = dd_pair();
        for shape in [vec![16usize, 16], vec![8, 8, 8]] {
            let y = dyadic_noise(&shape, 42);
            let mut c = OpCounter::new();
            let p = coset_decompose(&y, &s, &u, 2, &mut c).unwrap();
            let back = coset_reconstruct(&p, &u, &mut c).unwrap();
            assert_eq!(back, y);
        }
    }

    #[test]
    fn exact_round_trips_across_orders_and_dimensions() {
        for k in [1u32, 2, 3] {
            let s = catalog::dd_dual(k);
            let u = catalog::deslauriers_dubuc(k);
            for (shape, levels) in [
                (vec![16usize], 2u32),
                (vec![8, 8], 1),
                (vec![4, 4, 4], 1),
            ] {
                let y = dyadic_noise(&shape, 9 + k as u64);
                let mut c = OpCounter::new();
                let p = coset_decompose(&y, &s, &u, levels, &mut c).unwrap();
                let back = coset_reconstruct(&p, &u, &mut c).unwrap();
                assert_eq!(back, y, "k = {k}, shape {:?}", shape);
            }
        }
    }

    #[test]
    fn reconstruct_validates_band_shapes() {
        let (s, u) = dd_pair();
        let y = dyadic_noise(&[8, 8], 14);
        let mut c = OpCounter::new();
        let mut p = coset_decompose(&y, &s, &u, 1, &mut c).unwrap();
        p.aux[0] = Grid::zeros(&[2, 2]);
        assert!(matches!(
            coset_reconstruct(&p, &u, &mut c),
            Err(Error::ShapeMismatch { .. })
        ));
        p.aux.pop();
        assert!(coset_reconstruct(&p, &u, &mut c).is_err());
    }

    #[test]
    fn float_round_trip_error_is_tiny() {
        let (s, u) = dd_pair();
        let (s, u) = (s.to_float(), u.to_float());
        let y = dyadic_noise(&[32, 32], 7).to_float();
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 3, &mut c).unwrap();
        let back = coset_reconstruct(&p, &u, &mut c).unwrap();
        let scale = y.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_rel = y
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / scale;
        assert!(max_rel <= 1e-10, "max relative error {max_rel}");
    }

    #[test]
    fn preconditions_are_enforced() {
        let (s, u) = dd_pair();
        let y: Grid<Dyadic> = Grid::zeros(&[8, 8]);
        let mut c = OpCounter::new();
        // Haar is not symmetric
        let haar = catalog::haar();
        assert!(matches!(
            coset_decompose(&y, &s, &haar, 1, &mut c),
            Err(Error::NotSymmetric)
        ));
        // the dual mask is symmetric but not interpolatory
        assert!(matches!(
            coset_decompose(&y, &u, &s, 1, &mut c),
            Err(Error::NotInterpolatory)
        ));
        // indivisible shape
        let odd: Grid<Dyadic> = Grid::zeros(&[6, 8]);
        assert!(matches!(
            coset_decompose(&odd, &s, &u, 2, &mut c),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn impulse_bands_reproduce_the_system_masks() {
        // one decomposition level of a unit impulse lays out, band by band,
        // the filters of the analysis masks: coarse(k) = 2^{-n} h_tau(-2k),
        // w_v(k) = h_{t_v}(-2k)/2, aux(k) = 2^{1-n} h_{t_0}(-2k)
        let (s, u) = dd_pair();
        let sys = build_coset_system(&s, &u, 2).unwrap();
        let scaffold = build_scaffold(&sys.tau, &sys.taud, &sys.wavelets).unwrap();

        let mut y: Grid<Dyadic> = Grid::zeros(&[16, 16]);
        y.set(&[0, 0], Dyadic::one());
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 1, &mut c).unwrap();

        // scatter the even taps of a mask filter onto the half grid:
        // band(k) = norm * sum_{m even, m = -2k mod 16} h(m)
        let scatter = |mask: &Mask<Dyadic>, halving: u32| -> Grid<Dyadic> {
            let mut g: Grid<Dyadic> = Grid::zeros(&[8, 8]);
            for (idx, c) in mask.filter().iter() {
                let co = idx.coords();
                if co.iter().any(|&v| v % 2 != 0) {
                    continue; // odd filter positions are never sampled
                }
                let k = [
                    (-co[0] / 2).rem_euclid(8) as usize,
                    (-co[1] / 2).rem_euclid(8) as usize,
                ];
                let cur = g.get(&k).add(&c.div_pow2(halving));
                g.set(&k, cur);
            }
            g
        };

        // coarse(k) = 2^{-n} h_tau, aux(k) = 2^{1-n} h_{t_0}, and each detail
        // band is 2^{-n} h_{t_v} (the half normalization of the band times
        // the 2^{n-1} lift factor inside the stored wavelet filter)
        assert_eq!(p.coarse, scatter(&sys.tau, 2));
        assert_eq!(p.aux[0], scatter(&scaffold.t0, 1));
        for ((v, t), (vb, band)) in sys.wavelets.iter().zip(&p.details[0]) {
            assert_eq!(v, vb);
            assert_eq!(band, &scatter(t, 2), "band {:?}", v);
        }
    }

    #[test]
    fn production_matches_a_naive_transcription() {
        // independent oracle: evaluate the three per-entry formulas directly
        let (s, u) = dd_pair();
        let y = dyadic_noise(&[8, 8], 11);
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 1, &mut c).unwrap();

        let n = 2usize;
        let a_g = {
            let g0 = s.filter().get(&MultiIndex::new(vec![0]));
            Dyadic::from_int(2 - (1 << n)).add(&Dyadic::from_int((1 << n) - 1).mul(&g0))
        };
        let dirs = [[0i64, 1], [1, 0], [1, 1]];
        for kx in 0..4i64 {
            for ky in 0..4i64 {
                let mut coarse = a_g.mul(y.get_periodic(&[2 * kx, 2 * ky]));
                for d in dirs {
                    for (idx, gl) in s.filter().iter() {
                        let l = idx.coords()[0];
                        if l == 0 {
                            continue;
                        }
                        let pos = [2 * kx + l * d[0], 2 * ky + l * d[1]];
                        coarse = coarse.add(&gl.mul(y.get_periodic(&pos)));
                    }
                }
                coarse = coarse.div_pow2(n as u32);
                assert_eq!(p.coarse.get(&[kx as usize, ky as usize]), &coarse);

                for (di, d) in dirs.iter().enumerate() {
                    let mut w = y.get_periodic(&[2 * kx + d[0], 2 * ky + d[1]]).clone();
                    for (idx, hm) in u.filter().iter() {
                        let m = idx.coords()[0];
                        if m % 2 == 0 {
                            continue;
                        }
                        let pos = [2 * kx + (1 - m) * d[0], 2 * ky + (1 - m) * d[1]];
                        w = w.sub(&hm.mul(y.get_periodic(&pos)));
                    }
                    w = w.div_pow2(1);
                    assert_eq!(p.details[0][di].1.get(&[kx as usize, ky as usize]), &w);
                }

                let aux = y
                    .get_periodic(&[2 * kx, 2 * ky])
                    .sub(p.coarse.get(&[kx as usize, ky as usize]));
                assert_eq!(p.aux[0].get(&[kx as usize, ky as usize]), &aux);
            }
        }
    }

    #[test]
    fn operation_counts_match_the_per_entry_tally() {
        // per coarse entry with the 11-tap dual (10 side taps) and the 5-tap
        // interpolatory filter: coarse costs (2^n - 1) 10 + 1 + n, each of
        // the 2^n - 1 detail bands costs 5, and reconstruction adds 5 more
        // per band entry
        let (s, u) = dd_pair();
        for n in [1usize, 2, 3] {
            let shape = vec![8; n];
            let coarse_entries = (8usize.pow(n as u32) / (1 << n)) as u64;
            let dirs = (1u64 << n) - 1;
            let expect = coarse_entries * (dirs * 10 + 1 + n as u64 + 2 * dirs * 5);

            let y = dyadic_noise(&shape, 77);
            let mut c = OpCounter::new();
            let p = coset_decompose(&y, &s, &u, 1, &mut c).unwrap();
            coset_reconstruct(&p, &u, &mut c).unwrap();
            assert_eq!(c.ops(), expect, "n = {n}");
            assert_eq!(c.samples(), 8u64.pow(n as u32));
        }
    }

    #[test]
    fn operation_counts_scale_with_volume() {
        let (s, u) = dd_pair();
        let mut small = OpCounter::new();
        let y8 = dyadic_noise(&[8, 8], 1).to_float();
        let p = coset_decompose(&y8, &s.to_float(), &u.to_float(), 1, &mut small).unwrap();
        coset_reconstruct(&p, &u.to_float(), &mut small).unwrap();

        let mut big = OpCounter::new();
        let y16 = dyadic_noise(&[16, 16], 1).to_float();
        let p = coset_decompose(&y16, &s.to_float(), &u.to_float(), 1, &mut big).unwrap();
        coset_reconstruct(&p, &u.to_float(), &mut big).unwrap();

        assert_eq!(big.ops(), 4 * small.ops());
        assert_eq!(big.samples(), 4 * small.samples());
    }

    #[test]
    fn coarse_band_agrees_with_the_lifted_mask_analysis() {
        // the coarse step is the analysis convolution with the coset sum of
        // the primal mask: coarse(k) = 2^{-n} sum_m h(m) y(2k + m)
        let (s, u) = dd_pair();
        let tau = coset_sum(&s, &CosetReps::standard(2)).unwrap();
        let y = dyadic_noise(&[8, 8], 5);
        let mut c = OpCounter::new();
        let p = coset_decompose(&y, &s, &u, 1, &mut c).unwrap();
        for_each_coord(&[4, 4], |k| {
            let mut acc = Dyadic::zero();
            for (idx, hv) in tau.filter().iter() {
                let pos = [
                    2 * k[0] as i64 + idx.coords()[0],
                    2 * k[1] as i64 + idx.coords()[1],
                ];
                acc = acc.add(&hv.mul(y.get_periodic(&pos)));
            }
            assert_eq!(p.coarse.get(k), &acc.div_pow2(2));
        });
    }
}
