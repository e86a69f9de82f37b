use crate::{
    BenchmarkArgs, CliError, CliResult, Direction, Family, GenArgs, LiftOp, Method, Mode,
    SystemArgs, TransformArgs, VerifyArgs,
};
use coset_wavelets::analysis::{
    accuracy_number, is_biorthogonal, is_interpolatory, vanishing_moments, CheckDetail,
    CheckResult, MomentWitness,
};
use coset_wavelets::construct::{coset_sum, hybrid, tensor_power, BlockOp, HybridBlock};
use coset_wavelets::cosets::CosetReps;
use coset_wavelets::io::{self, AnySystem};
use coset_wavelets::mask::{AnyMask, Mask, MaskPair};
use coset_wavelets::scalar::{Coeff, Dyadic};
use coset_wavelets::system::{build_coset_system, build_tensor_system};
use coset_wavelets::transform::{
    coset_decompose, coset_reconstruct, measured_complexity, tensor_decompose,
    tensor_reconstruct, Grid, OpCounter, Pyramid,
};
use coset_wavelets::{catalog, Error, MultiIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

/// Library errors that stem from bad user input map to exit code 2; I/O and
/// resource errors map to 1.
fn lib_err(e: Error) -> CliError {
    match e {
        Error::Io(_) | Error::SupportCapExceeded { .. } => failure(e.to_string()),
        _ => usage(e.to_string()),
    }
}

/// Writes to stdout, exiting quietly if the consumer closed the pipe.
fn print_stdout(content: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = out
        .write_all(content.as_bytes())
        .and_then(|_| out.write_all(b"\n"));
    match done {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(failure(e.to_string())),
    }
}

fn emit(output: Option<&Path>, content: &str) -> CliResult {
    match output {
        Some(path) => std::fs::write(path, content).map_err(|e| failure(e.to_string()))?,
        None => print_stdout(content.trim_end())?,
    }
    Ok(0)
}

fn dd_order(order: Option<u32>) -> Result<u32, CliError> {
    let order = order.ok_or_else(|| usage("--order is required for the interpolatory family"))?;
    if order < 2 || order % 2 != 0 {
        return Err(usage(format!("--order must be even and >= 2, got {order}")));
    }
    Ok(order / 2)
}

/// The base univariate mask for a family, in the requested mode.
fn base_mask(family: Family, order: Option<u32>, mode: Mode) -> Result<AnyMask, CliError> {
    let exact = match family {
        Family::Haar => catalog::haar(),
        Family::Spline1 => catalog::linear_spline(),
        Family::Dd => catalog::deslauriers_dubuc(dd_order(order)?),
        Family::DdDual => catalog::dd_dual(dd_order(order)?),
        Family::Daub2 => {
            if mode == Mode::Exact {
                return Err(usage(
                    "the daub2 filter is irrational; use --mode float",
                ));
            }
            return Ok(AnyMask::Float(catalog::daubechies2()));
        }
    };
    Ok(match mode {
        Mode::Exact => AnyMask::Exact(exact),
        Mode::Float => AnyMask::Float(exact.to_float()),
    })
}

fn read_gamma(path: &Path, dim: usize) -> Result<CosetReps, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let reps: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("bad representatives file: {e}")))?;
    CosetReps::new(dim, reps.into_iter().map(MultiIndex::new).collect()).map_err(lib_err)
}

fn parse_blocks(spec: &str, dim: usize) -> Result<Vec<usize>, CliError> {
    let blocks: Vec<usize> = spec
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad --blocks list '{spec}'")))?;
    if blocks.iter().sum::<usize>() != dim || blocks.contains(&0) {
        return Err(usage(format!(
            "--blocks {spec} must be positive and sum to --dim {dim}"
        )));
    }
    Ok(blocks)
}

fn lift<C: Coeff>(
    base: &Mask<C>,
    op: LiftOp,
    dim: usize,
    gamma: Option<&CosetReps>,
    blocks: Option<&[usize]>,
) -> Result<Mask<C>, CliError> {
    match op {
        LiftOp::None => Ok(base.clone()),
        LiftOp::Cosetsum => {
            let standard = CosetReps::standard(dim);
            coset_sum(base, gamma.unwrap_or(&standard)).map_err(lib_err)
        }
        LiftOp::Tensor => tensor_power(base, dim).map_err(lib_err),
        LiftOp::Hybrid => {
            let blocks = blocks.ok_or_else(|| usage("--op hybrid requires --blocks"))?;
            let blocks: Vec<HybridBlock<C>> = blocks
                .iter()
                .map(|&d| HybridBlock {
                    op: BlockOp::CosetSum,
                    mask: base.clone(),
                    dim: d,
                })
                .collect();
            hybrid(&blocks).map_err(lib_err)
        }
    }
}

pub fn gen(args: &GenArgs) -> CliResult {
    let base = base_mask(args.family, args.order, args.mode)?;
    let dim = match args.op {
        LiftOp::None => 1,
        _ => args
            .dim
            .ok_or_else(|| usage("--dim is required when --op is not none"))?,
    };
    if args.gamma.is_some() && args.op != LiftOp::Cosetsum {
        return Err(usage("--gamma only applies to --op cosetsum"));
    }
    let gamma = match &args.gamma {
        Some(path) => Some(read_gamma(path, dim)?),
        None => None,
    };
    let blocks = match &args.blocks {
        Some(spec) => Some(parse_blocks(spec, dim)?),
        None => None,
    };
    let lifted = match &base {
        AnyMask::Exact(m) => AnyMask::Exact(lift(
            m,
            args.op,
            dim,
            gamma.as_ref(),
            blocks.as_deref(),
        )?),
        AnyMask::Float(m) => AnyMask::Float(lift(
            m,
            args.op,
            dim,
            gamma.as_ref(),
            blocks.as_deref(),
        )?),
    };
    emit(args.output.as_deref(), &io::mask_to_string(&lifted))
}

/// The univariate primal/dual pair behind a system or transform.
fn family_pair(
    family: Family,
    order: Option<u32>,
) -> Result<(Mask<Dyadic>, Mask<Dyadic>, String), CliError> {
    match family {
        Family::Dd => {
            let k = dd_order(order)?;
            Ok((
                catalog::dd_dual(k),
                catalog::deslauriers_dubuc(k),
                format!("dd:{}", 2 * k),
            ))
        }
        Family::Haar => Ok((catalog::haar(), catalog::haar(), "haar".into())),
        other => Err(usage(format!(
            "family {:?} has no biorthogonal catalog pair; use dd or haar",
            other
        ))),
    }
}

pub fn system(args: &SystemArgs) -> CliResult {
    let sys = match args.kind.as_str() {
        "coset" => {
            let (s, u, _) = family_pair(args.family, args.order)?;
            build_coset_system(&s, &u, args.dim).map_err(lib_err)?
        }
        "tensor" => {
            if args.family == Family::Daub2 {
                if args.mode == Mode::Exact {
                    return Err(usage("daub2 systems require --mode float"));
                }
                let d = catalog::daubechies2();
                let sys = build_tensor_system(&d, &d, args.dim).map_err(lib_err)?;
                let bundle = AnySystem::Float(sys);
                return emit(
                    args.output.as_deref(),
                    &serde_json::to_string_pretty(&io::system_to_json(&bundle))
                        .expect("system JSON is serializable"),
                );
            }
            let (s, u, _) = family_pair(args.family, args.order)?;
            build_tensor_system(&s, &u, args.dim).map_err(lib_err)?
        }
        other => return Err(usage(format!("unknown system kind '{other}'"))),
    };
    let bundle = match args.mode {
        Mode::Exact => AnySystem::Exact(sys),
        Mode::Float => AnySystem::Float(sys.to_float()),
    };
    emit(
        args.output.as_deref(),
        &serde_json::to_string_pretty(&io::system_to_json(&bundle))
            .expect("system JSON is serializable"),
    )
}

fn detail_string(detail: &CheckDetail) -> String {
    match detail {
        CheckDetail::Coefficient(idx) => format!("coefficient {}", idx.key()),
        CheckDetail::AtParity { gamma, index } => match index {
            Some(idx) => format!("at pi*({}), coefficient {}", gamma.key(), idx.key()),
            None => format!("at pi*({})", gamma.key()),
        },
    }
}

fn moment_string(w: &MomentWitness) -> String {
    let mu: Vec<String> = w.mu.iter().map(|m| m.to_string()).collect();
    format!("gamma={}; mu={}", w.gamma.key(), mu.join(","))
}

fn certificate(check: &str, r: &CheckResult) -> serde_json::Value {
    serde_json::json!({
        "check": check,
        "pass": r.pass,
        "residual": r.residual.to_f64(),
        "witness": r.detail.as_ref().map(detail_string),
    })
}

fn require_input(p: &Option<PathBuf>, flag: &str, check: &str) -> Result<PathBuf, CliError> {
    p.clone()
        .ok_or_else(|| usage(format!("--check {check} requires {flag}")))
}

pub fn verify(args: &VerifyArgs) -> CliResult {
    let (cert, pass) = match args.check.as_str() {
        "interpolatory" => {
            let path = require_input(&args.mask, "--mask", "interpolatory")?;
            let m = io::read_mask(&path).map_err(lib_err)?;
            let r = match &m {
                AnyMask::Exact(m) => is_interpolatory(m),
                AnyMask::Float(m) => is_interpolatory(m),
            };
            (certificate("interpolatory", &r), r.pass)
        }
        "biorthogonal" => {
            let a = io::read_mask(&require_input(&args.mask, "--mask", "biorthogonal")?)
                .map_err(lib_err)?;
            let b = io::read_mask(&require_input(&args.dual, "--dual", "biorthogonal")?)
                .map_err(lib_err)?;
            let r = match a.same_kind(&b).map_err(lib_err)? {
                MaskPair::Exact(a, b) => is_biorthogonal(a, b).map_err(lib_err)?,
                MaskPair::Float(a, b) => is_biorthogonal(a, b).map_err(lib_err)?,
            };
            (certificate("biorthogonal", &r), r.pass)
        }
        "accuracy" => {
            let m = io::read_mask(&require_input(&args.mask, "--mask", "accuracy")?)
                .map_err(lib_err)?;
            let report = match &m {
                AnyMask::Exact(m) => accuracy_number(m, args.cap),
                AnyMask::Float(m) => accuracy_number(m, args.cap),
            }
            .map_err(lib_err)?;
            let cert = serde_json::json!({
                "check": "accuracy",
                "pass": !report.capped,
                "accuracy": report.accuracy,
                "capped": report.capped,
                "witness": report.witness.as_ref().map(moment_string),
            });
            (cert, !report.capped)
        }
        "moments" => {
            let m = io::read_mask(&require_input(&args.mask, "--mask", "moments")?)
                .map_err(lib_err)?;
            let moments = match &m {
                AnyMask::Exact(m) => vanishing_moments(m, args.cap),
                AnyMask::Float(m) => vanishing_moments(m, args.cap),
            }
            .map_err(lib_err)?;
            let cert = serde_json::json!({
                "check": "moments",
                "pass": true,
                "moments": moments,
            });
            (cert, true)
        }
        "muep" => {
            let path = require_input(&args.system, "--system", "muep")?;
            let sys = io::read_system(&path).map_err(lib_err)?;
            let r = match &sys {
                AnySystem::Exact(s) => s.verify().map_err(lib_err)?,
                AnySystem::Float(s) => s.verify().map_err(lib_err)?,
            };
            (certificate("muep", &r), r.pass)
        }
        other => return Err(usage(format!("unknown check '{other}'"))),
    };
    let text = serde_json::to_string_pretty(&cert).expect("certificate is serializable");
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| failure(e.to_string()))?,
        None => print_stdout(&text)?,
    }
    Ok(if pass { 0 } else { 1 })
}

fn pyramid_to_float(p: &Pyramid<Dyadic>) -> Pyramid<f64> {
    Pyramid {
        system_id: p.system_id.clone(),
        input_shape: p.input_shape.clone(),
        levels: p.levels,
        coarse: p.coarse.to_float(),
        details: p
            .details
            .iter()
            .map(|bands| {
                bands
                    .iter()
                    .map(|(v, g)| (v.clone(), g.to_float()))
                    .collect()
            })
            .collect(),
        aux: p.aux.iter().map(|g| g.to_float()).collect(),
    }
}

fn pyramid_to_exact(p: &Pyramid<f64>) -> Result<Pyramid<Dyadic>, CliError> {
    Ok(Pyramid {
        system_id: p.system_id.clone(),
        input_shape: p.input_shape.clone(),
        levels: p.levels,
        coarse: p.coarse.to_exact().map_err(lib_err)?,
        details: p
            .details
            .iter()
            .map(|bands| {
                bands
                    .iter()
                    .map(|(v, g)| Ok((v.clone(), g.to_exact().map_err(lib_err)?)))
                    .collect::<Result<Vec<_>, CliError>>()
            })
            .collect::<Result<Vec<_>, CliError>>()?,
        aux: p
            .aux
            .iter()
            .map(|g| g.to_exact().map_err(lib_err))
            .collect::<Result<Vec<_>, CliError>>()?,
    })
}

fn summary(counter: &OpCounter) -> String {
    let per_sample = measured_complexity(counter)
        .map(|v| format!("{v:.4}"))
        .unwrap_or_else(|_| "n/a".into());
    format!(
        "samples={} ops={} ops_per_sample={}",
        counter.samples(),
        counter.ops(),
        per_sample
    )
}

pub fn transform(args: &TransformArgs) -> CliResult {
    let (s, u, pair_id) = match args.family {
        Family::Daub2 => {
            if args.method == Method::Coset {
                return Err(usage("the daub2 pair is asymmetric; use --method tensor"));
            }
            if args.mode == Mode::Exact {
                return Err(usage("daub2 transforms require --mode float"));
            }
            let d = catalog::daubechies2();
            let mut counter = OpCounter::new();
            return transform_float(args, &d, &d, "tensor:daub2", &mut counter);
        }
        _ => family_pair(args.family, args.order)?,
    };
    let method = match args.method {
        Method::Coset => "coset",
        Method::Tensor => "tensor",
    };
    let system_id = format!("{method}:{pair_id}");
    let mut counter = OpCounter::new();
    match args.mode {
        Mode::Float => transform_float(args, &s.to_float(), &u.to_float(), &system_id, &mut counter),
        Mode::Exact => transform_exact(args, &s, &u, &system_id, &mut counter),
    }
}

fn transform_float(
    args: &TransformArgs,
    s: &Mask<f64>,
    u: &Mask<f64>,
    system_id: &str,
    counter: &mut OpCounter,
) -> CliResult {
    match args.direction {
        Direction::Decompose => {
            let levels = args
                .levels
                .ok_or_else(|| usage("--levels is required for decomposition"))?;
            let y = io::read_grid(&args.input).map_err(lib_err)?;
            let mut p = match args.method {
                Method::Coset => coset_decompose(&y, s, u, levels, counter),
                Method::Tensor => tensor_decompose(&y, s, u, levels, counter),
            }
            .map_err(lib_err)?;
            p.system_id = system_id.to_string();
            io::write_pyramid(&args.output, &p).map_err(lib_err)?;
            print_stdout(&summary(counter))?;
            Ok(0)
        }
        Direction::Reconstruct => {
            let p = io::read_pyramid(&args.input).map_err(lib_err)?;
            if p.system_id != system_id {
                return Err(usage(format!(
                    "pyramid was produced by system '{}', not '{}'",
                    p.system_id, system_id
                )));
            }
            let y = match args.method {
                Method::Coset => coset_reconstruct(&p, u, counter),
                Method::Tensor => tensor_reconstruct(&p, s, u, counter),
            }
            .map_err(lib_err)?;
            io::write_grid(&args.output, &y).map_err(lib_err)?;
            print_stdout(&summary(counter))?;
            Ok(0)
        }
    }
}

fn transform_exact(
    args: &TransformArgs,
    s: &Mask<Dyadic>,
    u: &Mask<Dyadic>,
    system_id: &str,
    counter: &mut OpCounter,
) -> CliResult {
    match args.direction {
        Direction::Decompose => {
            let levels = args
                .levels
                .ok_or_else(|| usage("--levels is required for decomposition"))?;
            let y = io::read_grid(&args.input)
                .map_err(lib_err)?
                .to_exact()
                .map_err(lib_err)?;
            let mut p = match args.method {
                Method::Coset => coset_decompose(&y, s, u, levels, counter),
                Method::Tensor => tensor_decompose(&y, s, u, levels, counter),
            }
            .map_err(lib_err)?;
            p.system_id = system_id.to_string();
            io::write_pyramid(&args.output, &pyramid_to_float(&p)).map_err(lib_err)?;
            print_stdout(&summary(counter))?;
            Ok(0)
        }
        Direction::Reconstruct => {
            let p = io::read_pyramid(&args.input).map_err(lib_err)?;
            if p.system_id != system_id {
                return Err(usage(format!(
                    "pyramid was produced by system '{}', not '{}'",
                    p.system_id, system_id
                )));
            }
            let p = pyramid_to_exact(&p)?;
            let y = match args.method {
                Method::Coset => coset_reconstruct(&p, u, counter),
                Method::Tensor => tensor_reconstruct(&p, s, u, counter),
            }
            .map_err(lib_err)?;
            io::write_grid(&args.output, &y.to_float()).map_err(lib_err)?;
            print_stdout(&summary(counter))?;
            Ok(0)
        }
    }
}

/// Memory guard: refuse grids over this many samples (2 GiB of f64).
const MAX_BENCH_SAMPLES: usize = 1 << 28;

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>, CliError> {
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("bad {what} list '{spec}'")))
        })
        .collect()
}

pub fn benchmark(args: &BenchmarkArgs) -> CliResult {
    let methods: Vec<String> = args.methods.split(',').map(|s| s.trim().to_string()).collect();
    for m in &methods {
        if m != "coset" && m != "tensor" {
            return Err(usage(format!("unknown method '{m}'")));
        }
    }
    let dims: Vec<usize> = parse_list(&args.dims, "dimension")?;
    let orders: Vec<u32> = parse_list(&args.orders, "order")?;

    let mut out = String::from("method,n,k,ops_per_sample,seconds\n");
    for method in &methods {
        for &n in &dims {
            if n == 0 || n > 8 {
                return Err(usage(format!("dimension {n} out of range 1..=8")));
            }
            let axis = match args.size.as_str() {
                "auto" => 1usize << 8u32.saturating_sub(n as u32).max(2),
                s => s
                    .parse::<usize>()
                    .map_err(|_| usage(format!("bad --size '{s}'")))?,
            };
            let samples = axis.checked_pow(n as u32).filter(|&t| t <= MAX_BENCH_SAMPLES);
            let Some(_) = samples else {
                return Err(failure(format!(
                    "grid {axis}^{n} exceeds the benchmark memory guard"
                )));
            };
            let levels = match args.levels.as_str() {
                "auto" => axis.trailing_zeros(),
                s => s
                    .parse::<u32>()
                    .map_err(|_| usage(format!("bad --levels '{s}'")))?,
            };
            for &order in &orders {
                let k = dd_order(Some(order))?;
                let s = catalog::dd_dual(k).to_float();
                let u = catalog::deslauriers_dubuc(k).to_float();

                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                let shape = vec![axis; n];
                let len: usize = shape.iter().product();
                let data: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let y = Grid::from_data(&shape, data).map_err(lib_err)?;

                let mut counter = OpCounter::new();
                let start = Instant::now();
                let (per_sample, elapsed) = match method.as_str() {
                    "coset" => {
                        let p = coset_decompose(&y, &s, &u, levels, &mut counter)
                            .map_err(lib_err)?;
                        let back = coset_reconstruct(&p, &u, &mut counter).map_err(lib_err)?;
                        let elapsed = start.elapsed().as_secs_f64();
                        debug_assert_eq!(back.shape(), y.shape());
                        (measured_complexity(&counter).map_err(lib_err)?, elapsed)
                    }
                    _ => {
                        let p = tensor_decompose(&y, &s, &u, levels, &mut counter)
                            .map_err(lib_err)?;
                        let back =
                            tensor_reconstruct(&p, &s, &u, &mut counter).map_err(lib_err)?;
                        let elapsed = start.elapsed().as_secs_f64();
                        debug_assert_eq!(back.shape(), y.shape());
                        (measured_complexity(&counter).map_err(lib_err)?, elapsed)
                    }
                };
                out.push_str(&format!(
                    "{method},{n},{k},{per_sample:.6},{elapsed:.6}\n"
                ));
            }
        }
    }
    emit(args.output.as_deref(), &out)
}
