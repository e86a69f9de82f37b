//! Serialization: canonical filter JSON, system bundles, the raw grid
//! binary format, and pyramid directories.
//!
//! Filter JSON is canonical: entries are sorted lexicographically by index,
//! exact coefficients carry a decimal numerator string and a power-of-two
//! exponent, float coefficients carry a plain number.

use crate::error::{Error, Result};
use crate::filter::{Filter, MultiIndex, ParityPoint};
use crate::mask::{AnyMask, Mask};
use crate::scalar::{Coeff, Dyadic};
use crate::system::{SystemKind, WaveletSystem};
use crate::transform::{Grid, Pyramid};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

pub const MODE_EXACT: &str = "exact";
pub const MODE_FLOAT: &str = "float";

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EntryJson {
    pub index: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp2: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FilterJson {
    pub dim: usize,
    pub mode: String,
    pub entries: Vec<EntryJson>,
}

pub fn mask_to_json(m: &AnyMask) -> FilterJson {
    match m {
        AnyMask::Exact(m) => FilterJson {
            dim: m.dim(),
            mode: MODE_EXACT.into(),
            entries: m
                .filter()
                .iter()
                .map(|(idx, c)| EntryJson {
                    index: idx.coords().to_vec(),
                    num: Some(c.numerator().to_string()),
                    exp2: Some(c.exponent()),
                    value: None,
                })
                .collect(),
        },
        AnyMask::Float(m) => FilterJson {
            dim: m.dim(),
            mode: MODE_FLOAT.into(),
            entries: m
                .filter()
                .iter()
                .map(|(idx, c)| EntryJson {
                    index: idx.coords().to_vec(),
                    num: None,
                    exp2: None,
                    value: Some(*c),
                })
                .collect(),
        },
    }
}

pub fn mask_from_json(j: &FilterJson) -> Result<AnyMask> {
    match j.mode.as_str() {
        MODE_EXACT => {
            let mut f: Filter<Dyadic> = Filter::new(j.dim);
            for e in &j.entries {
                let num = e
                    .num
                    .as_deref()
                    .ok_or_else(|| Error::Invalid("exact entry missing 'num'".into()))?;
                let num = BigInt::from_str(num)
                    .map_err(|_| Error::Invalid(format!("bad numerator '{num}'")))?;
                let exp2 = e
                    .exp2
                    .ok_or_else(|| Error::Invalid("exact entry missing 'exp2'".into()))?;
                if e.index.len() != j.dim {
                    return Err(Error::DimensionMismatch(j.dim, e.index.len()));
                }
                f.accumulate(MultiIndex::new(e.index.clone()), Dyadic::new(num, exp2));
            }
            Ok(AnyMask::Exact(Mask::from_filter(f)))
        }
        MODE_FLOAT => {
            let mut f: Filter<f64> = Filter::new(j.dim);
            for e in &j.entries {
                let value = e
                    .value
                    .ok_or_else(|| Error::Invalid("float entry missing 'value'".into()))?;
                if e.index.len() != j.dim {
                    return Err(Error::DimensionMismatch(j.dim, e.index.len()));
                }
                f.accumulate(MultiIndex::new(e.index.clone()), value);
            }
            Ok(AnyMask::Float(Mask::from_filter(f)))
        }
        other => Err(Error::Invalid(format!(
            "unknown mode '{other}', expected 'exact' or 'float'"
        ))),
    }
}

pub fn mask_to_string(m: &AnyMask) -> String {
    serde_json::to_string_pretty(&mask_to_json(m)).expect("filter JSON is serializable")
}

pub fn mask_from_str(s: &str) -> Result<AnyMask> {
    let j: FilterJson = serde_json::from_str(s)?;
    mask_from_json(&j)
}

pub fn write_mask(path: &Path, m: &AnyMask) -> Result<()> {
    std::fs::write(path, mask_to_string(m))?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<AnyMask> {
    mask_from_str(&std::fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SystemJson {
    pub dim: usize,
    pub kind: String,
    pub tau: FilterJson,
    pub taud: FilterJson,
    pub wavelets: BTreeMap<String, FilterJson>,
    pub duals: BTreeMap<String, FilterJson>,
}

/// A deserialized system of either scalar kind.
#[derive(Clone, Debug)]
pub enum AnySystem {
    Exact(WaveletSystem<Dyadic>),
    Float(WaveletSystem<f64>),
}

fn generic_system_to_json<C: Coeff>(
    sys: &WaveletSystem<C>,
    wrap: impl Fn(Mask<C>) -> AnyMask,
) -> SystemJson {
    let encode = |pairs: &[(ParityPoint, Mask<C>)]| {
        pairs
            .iter()
            .map(|(v, m)| (v.key(), mask_to_json(&wrap(m.clone()))))
            .collect()
    };
    SystemJson {
        dim: sys.dim(),
        kind: sys.kind.as_str().into(),
        tau: mask_to_json(&wrap(sys.tau.clone())),
        taud: mask_to_json(&wrap(sys.taud.clone())),
        wavelets: encode(&sys.wavelets),
        duals: encode(&sys.duals),
    }
}

pub fn system_to_json(sys: &AnySystem) -> SystemJson {
    match sys {
        AnySystem::Exact(s) => generic_system_to_json(s, AnyMask::Exact),
        AnySystem::Float(s) => generic_system_to_json(s, AnyMask::Float),
    }
}

fn parse_kind(s: &str) -> Result<SystemKind> {
    match s {
        "coset" => Ok(SystemKind::Coset),
        "tensor" => Ok(SystemKind::Tensor),
        "univariate" => Ok(SystemKind::Univariate),
        other => Err(Error::Invalid(format!("unknown system kind '{other}'"))),
    }
}

fn parse_direction(key: &str, dim: usize) -> Result<ParityPoint> {
    let coords: Vec<u8> = key
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u8>()
                .map_err(|_| Error::Invalid(format!("bad direction key '{key}'")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch(dim, coords.len()));
    }
    ParityPoint::new(coords)
}

fn collect_masks<C: Coeff>(
    map: &BTreeMap<String, FilterJson>,
    dim: usize,
    unwrap: impl Fn(AnyMask) -> Result<Mask<C>>,
) -> Result<Vec<(ParityPoint, Mask<C>)>> {
    let mut out = Vec::new();
    for (key, fj) in map {
        out.push((parse_direction(key, dim)?, unwrap(mask_from_json(fj)?)?));
    }
    // BTreeMap's string order is not the bit order; re-sort by direction
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub fn system_from_json(j: &SystemJson) -> Result<AnySystem> {
    let kind = parse_kind(&j.kind)?;
    match mask_from_json(&j.tau)? {
        AnyMask::Exact(tau) => {
            let unwrap = |m: AnyMask| match m {
                AnyMask::Exact(m) => Ok(m),
                AnyMask::Float(_) => Err(Error::MixedKinds),
            };
            let taud = unwrap(mask_from_json(&j.taud)?)?;
            Ok(AnySystem::Exact(WaveletSystem {
                kind,
                tau,
                taud,
                wavelets: collect_masks(&j.wavelets, j.dim, unwrap)?,
                duals: collect_masks(&j.duals, j.dim, unwrap)?,
            }))
        }
        AnyMask::Float(tau) => {
            let unwrap = |m: AnyMask| match m {
                AnyMask::Float(m) => Ok(m),
                AnyMask::Exact(_) => Err(Error::MixedKinds),
            };
            let taud = unwrap(mask_from_json(&j.taud)?)?;
            Ok(AnySystem::Float(WaveletSystem {
                kind,
                tau,
                taud,
                wavelets: collect_masks(&j.wavelets, j.dim, unwrap)?,
                duals: collect_masks(&j.duals, j.dim, unwrap)?,
            }))
        }
    }
}

pub fn write_system(path: &Path, sys: &AnySystem) -> Result<()> {
    let s = serde_json::to_string_pretty(&system_to_json(sys))?;
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_system(path: &Path) -> Result<AnySystem> {
    let j: SystemJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    system_from_json(&j)
}

const GRID_MAGIC: &[u8; 4] = b"CSWG";
const GRID_VERSION: u32 = 1;

/// Writes a grid: magic `CSWG`, version u32, dim u32, per-axis sizes u64,
/// payload little-endian f64 row-major.
pub fn write_grid(path: &Path, g: &Grid<f64>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(GRID_MAGIC)?;
    w.write_all(&GRID_VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for &s in g.shape() {
        w.write_all(&(s as u64).to_le_bytes())?;
    }
    for v in g.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<Grid<f64>> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != GRID_MAGIC {
        return Err(Error::Invalid(format!(
            "bad grid magic {:?} in {}",
            magic,
            path.display()
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != GRID_VERSION {
        return Err(Error::Invalid(format!(
            "unsupported grid version {version}"
        )));
    }
    r.read_exact(&mut u32buf)?;
    let dim = u32::from_le_bytes(u32buf) as usize;
    if dim == 0 || dim > 16 {
        return Err(Error::Invalid(format!("implausible grid dimension {dim}")));
    }
    let mut shape = Vec::with_capacity(dim);
    let mut u64buf = [0u8; 8];
    for _ in 0..dim {
        r.read_exact(&mut u64buf)?;
        shape.push(u64::from_le_bytes(u64buf) as usize);
    }
    let len: usize = shape.iter().product();
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut u64buf)?;
        data.push(f64::from_le_bytes(u64buf));
    }
    Grid::from_data(&shape, data)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PyramidManifest {
    pub levels: u32,
    #[serde(rename = "system-id")]
    pub system_id: String,
    pub shapes: ManifestShapes,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ManifestShapes {
    pub input: Vec<usize>,
    pub coarse: Vec<usize>,
}

/// Writes a pyramid as a directory: `manifest.json`, `coarse.bin`,
/// `w_<level>_<direction>.bin` and (coset method) `a_<level>.bin`.
pub fn write_pyramid(dir: &Path, p: &Pyramid<f64>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let manifest = PyramidManifest {
        levels: p.levels,
        system_id: p.system_id.clone(),
        shapes: ManifestShapes {
            input: p.input_shape.clone(),
            coarse: p.coarse.shape().to_vec(),
        },
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    write_grid(&dir.join("coarse.bin"), &p.coarse)?;
    for (j, bands) in p.details.iter().enumerate() {
        for (v, g) in bands {
            write_grid(&dir.join(format!("w_{}_{}.bin", j, v.key())), g)?;
        }
    }
    for (j, g) in p.aux.iter().enumerate() {
        write_grid(&dir.join(format!("a_{}.bin", j)), g)?;
    }
    Ok(())
}

pub fn read_pyramid(dir: &Path) -> Result<Pyramid<f64>> {
    let manifest: PyramidManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
    let coarse = read_grid(&dir.join("coarse.bin"))?;
    if coarse.shape() != manifest.shapes.coarse.as_slice() {
        return Err(Error::ShapeMismatch {
            expected: manifest.shapes.coarse.clone(),
            got: coarse.shape().to_vec(),
        });
    }
    let dim = manifest.shapes.input.len();
    let mut details = Vec::new();
    let mut aux = Vec::new();
    let has_aux = dir.join("a_0.bin").exists();
    for j in 0..manifest.levels as usize {
        let mut bands = Vec::new();
        for v in ParityPoint::nonzero(dim) {
            let g = read_grid(&dir.join(format!("w_{}_{}.bin", j, v.key())))?;
            bands.push((v, g));
        }
        details.push(bands);
        if has_aux {
            aux.push(read_grid(&dir.join(format!("a_{}.bin", j)))?);
        }
    }
    Ok(Pyramid {
        system_id: manifest.system_id,
        input_shape: manifest.shapes.input,
        levels: manifest.levels,
        coarse,
        details,
        aux,
    })
}
