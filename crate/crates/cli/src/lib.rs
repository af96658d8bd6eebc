//! Batch front end: parse instance files, dispatch the library operations,
//! and emit machine-readable JSON records. Exit codes: 0 success (or the
//! strong/qualified verdict), 2 a violation certificate was produced,
//! 1 error.

pub mod formats;
mod selftest;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use basepack_core::arrangement::{self, ArrangementOracle};
use basepack_core::bruteforce;
use basepack_core::equivalence::{
    good_decompose, verify_chain, walk, GoodDecomposition, GoodOutcome, LocalRelationWitness,
    WalkChain,
};
use basepack_core::packing::{
    compute_a1, compute_a2_bruteforce, is_qualified_bruteforce, strong_decompose, Qualification,
    SplitOutcome, ViolationCertificate,
};
use basepack_core::potential::{build_l, build_q, verify_potentials, BuildMode, MockOracle, StructureOracle};
use basepack_core::{Complex64, Configuration, Decomposition, SubspaceRep, System};

use formats::*;

#[derive(Parser)]
#[command(name = "basepack", version, about = "Split vector systems into bases, walk between good decompositions, assemble potentials")]
struct Cli {
    /// Thread count for enumeration-heavy subcommands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArg {
    /// Instance file (field, k, m, vectors, system).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Split the system into m bases plus an l-tail, or emit a certificate.
    Split {
        #[command(flatten)]
        instance: InstanceArg,
        /// Tail size; defaults to |T| − mk.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Exhaustively check the qualification bounds μ(T,U) ≤ l + m·dim U.
    Qualify {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Tail candidates A₁ of an (mk+1)-system, with witnesses.
    A1 {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Support of the minimal tight subspace, A₂.
    A2 {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Produce the deterministic good decomposition of the system.
    Good {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Connect two good decompositions by a verified chain of local moves.
    Walk {
        #[command(flatten)]
        instance: InstanceArg,
        /// JSON file with {"t1": ..., "t2": ...} for the left endpoint.
        #[arg(long)]
        left: PathBuf,
        /// JSON file with {"t1": ..., "t2": ...} for the right endpoint.
        #[arg(long)]
        right: PathBuf,
    },
    /// Assemble the homogeneous potential Q from flat oracle values.
    PotentialQ {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, conflicts_with = "mock")]
        arrangement: Option<PathBuf>,
        /// Constant mock oracle value instead of an arrangement file.
        #[arg(long)]
        mock: Option<f64>,
    },
    /// Assemble the truncated potential L around a basepoint.
    PotentialL {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, conflicts_with = "mock")]
        arrangement: Option<PathBuf>,
        #[arg(long)]
        mock: Option<f64>,
        /// Truncation degree; defaults to mk + 2.
        #[arg(long)]
        degree: Option<usize>,
        /// Basepoint "x1,x2,..."; defaults to the arrangement basepoint.
        #[arg(long)]
        basepoint: Option<String>,
        /// Evaluate every good decomposition and report candidate spreads.
        #[arg(long)]
        cross_check: bool,
        /// Relative spread tolerance in cross-check mode.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Validate an arrangement model: critical points, kernel identity,
    /// pairing symmetry, flatness over sampled parameter points.
    ArrangementCheck {
        #[arg(long)]
        arrangement: PathBuf,
        /// Parameter samples for the flatness sweep.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
    /// Re-verify an emitted record (decomposition, certificate, good
    /// decomposition, or chain) against an instance.
    Verify {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        record: PathBuf,
    },
    /// Run the built-in randomized smoke checks.
    Selftest {
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        trials: usize,
    },
}

/// Entry point used by both `main` and the integration tests.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn emit(out: &mut dyn Write, doc: &Value) -> anyhow::Result<()> {
    writeln!(out, "{}", serde_json::to_string(doc)?)?;
    Ok(())
}

fn load_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("in {}", path.display()))
}

fn effective_tail(instance: &Instance, flag: Option<usize>) -> anyhow::Result<usize> {
    let mk = instance.config.m() * instance.config.k();
    let implied = instance.system.size().checked_sub(mk).ok_or_else(|| {
        anyhow!(
            "system has {} slots, fewer than mk = {mk}",
            instance.system.size()
        )
    })?;
    for stated in [flag, instance.tail_budget].into_iter().flatten() {
        if stated != implied {
            bail!(
                "stated l = {stated} disagrees with |T| − mk = {implied}"
            );
        }
    }
    Ok(implied)
}

fn dispatch(command: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Split { instance, l } => {
            let inst = load_instance(&instance.input)?;
            let l = effective_tail(&inst, l)?;
            match strong_decompose(&inst.config, &inst.system, l)? {
                SplitOutcome::Decomposed(d) => {
                    emit(out, &decomposition_json(&d, l))?;
                    Ok(0)
                }
                SplitOutcome::Violation(c) => {
                    emit(out, &certificate_json(&c))?;
                    Ok(2)
                }
            }
        }
        Command::Qualify { instance, l } => {
            let inst = load_instance(&instance.input)?;
            let l = effective_tail(&inst, l)?;
            match is_qualified_bruteforce(&inst.config, &inst.system, l)? {
                Qualification::Qualified => {
                    emit(out, &serde_json::json!({"kind": "qualification", "qualified": true}))?;
                    Ok(0)
                }
                Qualification::Violated(c) => {
                    emit(
                        out,
                        &serde_json::json!({
                            "kind": "qualification",
                            "qualified": false,
                            "certificate": certificate_json(&c),
                        }),
                    )?;
                    Ok(2)
                }
            }
        }
        Command::A1 { instance } => {
            let inst = load_instance(&instance.input)?;
            let members = compute_a1(&inst.config, &inst.system)?;
            let witnesses: serde_json::Map<String, Value> = members
                .iter()
                .map(|(i, d)| (i.to_string(), decomposition_json(d, 1)))
                .collect();
            emit(
                out,
                &serde_json::json!({
                    "kind": "a1",
                    "members": members.keys().collect::<Vec<_>>(),
                    "witnesses": witnesses,
                }),
            )?;
            Ok(0)
        }
        Command::A2 { instance, l } => {
            let inst = load_instance(&instance.input)?;
            let l = effective_tail(&inst, l)?;
            if let Qualification::Violated(c) =
                is_qualified_bruteforce(&inst.config, &inst.system, l)?
            {
                emit(out, &certificate_json(&c))?;
                return Ok(2);
            }
            let (members, subspace) = compute_a2_bruteforce(&inst.config, &inst.system, l)?;
            emit(
                out,
                &serde_json::json!({
                    "kind": "a2",
                    "members": members,
                    "subspace": {
                        "dim": subspace.dim,
                        "rref_basis": subspace.rref_basis.iter()
                            .map(|row| row.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    },
                }),
            )?;
            Ok(0)
        }
        Command::Good { instance } => {
            let inst = load_instance(&instance.input)?;
            match good_decompose(&inst.config, &inst.system)? {
                GoodOutcome::Good(g) => {
                    emit(out, &good_json(&g))?;
                    Ok(0)
                }
                GoodOutcome::Violation(c) => {
                    emit(out, &certificate_json(&c))?;
                    Ok(2)
                }
            }
        }
        Command::Walk { instance, left, right } => {
            let inst = load_instance(&instance.input)?;
            let read = |path: &PathBuf| -> anyhow::Result<GoodDecomposition> {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                let value: Value = serde_json::from_str(&text)
                    .with_context(|| format!("{} is not valid JSON", path.display()))?;
                parse_good_decomposition(&inst.config, &inst.system, &value)
                    .with_context(|| format!("in {}", path.display()))
            };
            let left = read(&left)?;
            let right = read(&right)?;
            let chain = walk(&inst.config, &left, &right)?;
            emit(out, &chain_json(&chain))?;
            Ok(0)
        }
        Command::PotentialQ { instance, arrangement, mock } => {
            let inst = load_instance(&instance.input)?;
            let oracle = make_oracle(&inst.config, arrangement.as_ref(), mock)?;
            let q = build_q(&inst.config, oracle.as_ref())?;
            emit(out, &polynomial_json(&q))?;
            Ok(0)
        }
        Command::PotentialL {
            instance,
            arrangement,
            mock,
            degree,
            basepoint,
            cross_check,
            tolerance,
        } => {
            let inst = load_instance(&instance.input)?;
            let oracle = make_oracle(&inst.config, arrangement.as_ref(), mock)?;
            let mk = inst.config.m() * inst.config.k();
            let degree = degree.unwrap_or(mk + 2);
            let x = match basepoint {
                Some(text) => parse_point(&text, inst.config.n())?,
                None => default_basepoint(&oracle, arrangement.is_some(), inst.config.n())?,
            };
            let mode = if cross_check {
                BuildMode::CrossCheckAll {
                    tolerance: tolerance.unwrap_or_else(|| oracle.derivative_tolerance() * 10.0),
                }
            } else {
                BuildMode::FirstFound
            };
            let (l_poly, report) = build_l(&inst.config, oracle.as_ref(), &x, degree, mode)?;
            let mut doc = polynomial_json(&l_poly);
            if cross_check {
                doc.as_object_mut()
                    .unwrap()
                    .insert("report".into(), consistency_json(&report));
            }
            let q = build_q(&inst.config, oracle.as_ref())?;
            let verification = verify_potentials(&inst.config, oracle.as_ref(), &q, &l_poly, 500)?;
            doc.as_object_mut()
                .unwrap()
                .insert("verification".into(), verification_json(&verification));
            emit(out, &doc)?;
            Ok(0)
        }
        Command::ArrangementCheck { arrangement, samples, seed } => {
            let text = std::fs::read_to_string(&arrangement)
                .with_context(|| format!("cannot read {}", arrangement.display()))?;
            let model = parse_arrangement(&text)?;
            let report = arrangement_report(&model, samples, seed)?;
            let pass = report
                .get("pass")
                .and_then(Value::as_bool)
                .unwrap_or(false);
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Verify { instance, record } => {
            let inst = load_instance(&instance.input)?;
            let text = std::fs::read_to_string(&record)
                .with_context(|| format!("cannot read {}", record.display()))?;
            let value: Value = serde_json::from_str(&text)
                .with_context(|| format!("{} is not valid JSON", record.display()))?;
            match verify_record(&inst, &value) {
                Ok(()) => {
                    emit(out, &serde_json::json!({"kind": "verification", "valid": true}))?;
                    Ok(0)
                }
                Err(e) => {
                    emit(
                        out,
                        &serde_json::json!({
                            "kind": "verification",
                            "valid": false,
                            "reason": format!("{e:#}"),
                        }),
                    )?;
                    Ok(1)
                }
            }
        }
        Command::Selftest { seed, trials } => {
            let report = selftest::run(seed, trials)?;
            let pass = report
                .get("pass")
                .and_then(Value::as_bool)
                .unwrap_or(false);
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn parse_point(text: &str, n: usize) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("bad coordinate {p:?}: {e}")))
        .collect::<anyhow::Result<_>>()?;
    if parts.len() != n {
        bail!("expected {n} coordinates, got {}", parts.len());
    }
    Ok(parts)
}

fn make_oracle(
    config: &Configuration,
    arrangement: Option<&PathBuf>,
    mock: Option<f64>,
) -> anyhow::Result<Box<dyn OracleWithBase>> {
    match (arrangement, mock) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let model = parse_arrangement(&text)?;
            if model.n() != config.n() || model.k() != config.k() || config.m() != 2 {
                bail!(
                    "arrangement of order ({}, {}, 2) does not match the instance ({}, {}, {})",
                    model.n(),
                    model.k(),
                    config.n(),
                    config.k(),
                    config.m()
                );
            }
            Ok(Box::new(ArrangementOracle::new(model)))
        }
        (None, Some(c)) => Ok(Box::new(MockOracle::new(config, Complex64::new(c, 0.0)))),
        (None, None) => bail!("choose an oracle: --arrangement FILE or --mock CONSTANT"),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    }
}

/// Oracles the CLI can instantiate, with an optional preferred basepoint.
trait OracleWithBase: StructureOracle {
    fn preferred_basepoint(&self) -> Option<Vec<f64>>;
}

impl OracleWithBase for ArrangementOracle {
    fn preferred_basepoint(&self) -> Option<Vec<f64>> {
        Some(self.model().basepoint().to_vec())
    }
}

impl OracleWithBase for MockOracle {
    fn preferred_basepoint(&self) -> Option<Vec<f64>> {
        None
    }
}

fn default_basepoint(
    oracle: &Box<dyn OracleWithBase>,
    from_arrangement: bool,
    n: usize,
) -> anyhow::Result<Vec<f64>> {
    match oracle.preferred_basepoint() {
        Some(x) => Ok(x),
        None if !from_arrangement => Ok(vec![0.0; n]),
        None => bail!("no basepoint available; pass --basepoint"),
    }
}

fn arrangement_report(
    model: &basepack_core::arrangement::ArrangementModel,
    samples: usize,
    seed: u64,
) -> anyhow::Result<Value> {
    use rand::Rng;
    let mut rng = basepack_core::corpus::rng_from_seed(seed);
    let crit = arrangement::critical_points(model, model.basepoint())?;
    let kernel = arrangement::kernel_residual(model, &crit);

    // pairing symmetry on random value vectors at the basepoint
    let mut symmetry = 0.0f64;
    for _ in 0..5 {
        let g: Vec<Complex64> = (0..crit.points.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let h: Vec<Complex64> = (0..crit.points.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let gh = arrangement::residue_pairing(model, &crit, &g, &h)?;
        let hg = arrangement::residue_pairing(model, &crit, &h, &g)?;
        symmetry = symmetry.max((gh - hg).norm());
    }

    // flatness over jittered parameter points, for k = 1 singleton pairs
    let mut flatness: f64 = 0.0;
    let mut kernel_sweep = kernel;
    let mut zs = Vec::with_capacity(samples);
    let scale = 1.0 + model.basepoint().iter().map(|x| x.abs()).fold(0.0, f64::max);
    while zs.len() < samples {
        let z: Vec<f64> = model
            .basepoint()
            .iter()
            .map(|x| x + rng.gen_range(-0.5..0.5) * scale)
            .collect();
        match arrangement::critical_points(model, &z) {
            Ok(c) => {
                kernel_sweep = kernel_sweep.max(arrangement::kernel_residual(model, &c));
                zs.push(z);
            }
            Err(_) => continue,
        }
    }
    if model.k() == 1 {
        for i in 1..=model.n() as u32 {
            for j in i..=model.n() as u32 {
                flatness = flatness.max(arrangement::check_flatness(model, &[i], &[j], &zs)?);
            }
        }
    }

    let tol = model.tolerances();
    let pass = kernel_sweep < tol.kernel && symmetry < 1e-12 && flatness < 1e-6;
    Ok(serde_json::json!({
        "kind": "arrangement_report",
        "critical_points": crit.points.len(),
        "certified_count": crit.certified,
        "expected_count": crit.expected_count,
        "kernel_residual": kernel_sweep,
        "pairing_symmetry": symmetry,
        "flatness_max": flatness,
        "samples": samples,
        "weights_unchecked": model.weights_unchecked(),
        "pass": pass,
    }))
}

fn parse_decomposition_record(value: &Value) -> anyhow::Result<(Decomposition, usize)> {
    let obj = value.as_object().ok_or_else(|| anyhow!("record must be an object"))?;
    let parts = obj
        .get("parts")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"parts\""))?
        .iter()
        .map(parse_system_pairs)
        .collect::<anyhow::Result<Vec<System>>>()?;
    let tail = parse_system_pairs(obj.get("tail").ok_or_else(|| anyhow!("missing \"tail\""))?)?;
    let l = obj
        .get("l")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing \"l\""))? as usize;
    Ok((Decomposition { parts, tail }, l))
}

fn parse_certificate_record(
    inst: &Instance,
    value: &Value,
) -> anyhow::Result<(ViolationCertificate, usize)> {
    let obj = value.as_object().ok_or_else(|| anyhow!("record must be an object"))?;
    let support: Vec<u32> = obj
        .get("support")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"support\""))?
        .iter()
        .map(|v| v.as_u64().map(|i| i as u32).ok_or_else(|| anyhow!("bad support index")))
        .collect::<anyhow::Result<_>>()?;
    let sub = obj
        .get("subspace")
        .and_then(Value::as_object)
        .ok_or_else(|| anyhow!("missing \"subspace\""))?;
    let rows = sub
        .get("rref_basis")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"rref_basis\""))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| anyhow!("basis rows must be arrays"))?
                .iter()
                .map(|s| {
                    let s = s.as_str().ok_or_else(|| anyhow!("basis entries are strings"))?;
                    Ok(inst.config.field().parse(s)?)
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let subspace = SubspaceRep::from_spanning(&rows, inst.config.k())?;
    let mu_value = obj
        .get("mu")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing \"mu\""))? as usize;
    let bound = obj
        .get("bound")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing \"bound\""))? as usize;
    let l = bound
        .checked_sub(inst.config.m() * subspace.dim)
        .ok_or_else(|| anyhow!("bound is below m·dim U"))?;
    Ok((
        ViolationCertificate { support_subset: support, subspace, mu_value, bound },
        l,
    ))
}

fn parse_chain_record(value: &Value) -> anyhow::Result<WalkChain> {
    let obj = value.as_object().ok_or_else(|| anyhow!("record must be an object"))?;
    let members: Vec<GoodDecomposition> = obj
        .get("members")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"members\""))?
        .iter()
        .map(parse_good_record)
        .collect::<anyhow::Result<_>>()?;
    let witness_values = obj
        .get("witnesses")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"witnesses\""))?;
    if witness_values.len() + 1 != members.len() {
        bail!("chain with {} members needs {} witnesses", members.len(), members.len() - 1);
    }
    let mut witnesses = Vec::with_capacity(witness_values.len());
    for (idx, w) in witness_values.iter().enumerate() {
        let obj = w.as_object().ok_or_else(|| anyhow!("witness {idx} must be an object"))?;
        let shared_parts = obj
            .get("shared_parts")
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("witness {idx} misses \"shared_parts\""))?
            .iter()
            .map(parse_system_pairs)
            .collect::<anyhow::Result<Vec<System>>>()?;
        let left_tail =
            parse_system_pairs(obj.get("left_tail").ok_or_else(|| anyhow!("missing left_tail"))?)?;
        let right_tail = parse_system_pairs(
            obj.get("right_tail").ok_or_else(|| anyhow!("missing right_tail"))?,
        )?;
        witnesses.push(LocalRelationWitness {
            left: members[idx].clone(),
            right: members[idx + 1].clone(),
            shared_parts,
            left_tail,
            right_tail,
        });
    }
    Ok(WalkChain { members, witnesses })
}

fn parse_good_record(value: &Value) -> anyhow::Result<GoodDecomposition> {
    let obj = value.as_object().ok_or_else(|| anyhow!("expected a good decomposition object"))?;
    let t1 = parse_system_pairs(obj.get("t1").ok_or_else(|| anyhow!("missing t1"))?)?;
    let t2 = parse_system_pairs(obj.get("t2").ok_or_else(|| anyhow!("missing t2"))?)?;
    let (witness, _) = parse_decomposition_record(
        obj.get("witness").ok_or_else(|| anyhow!("missing witness"))?,
    )?;
    Ok(GoodDecomposition { t1, t2, witness })
}

fn verify_record(inst: &Instance, value: &Value) -> anyhow::Result<()> {
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("record carries no \"kind\""))?;
    match kind {
        "decomposition" => {
            let (d, l) = parse_decomposition_record(value)?;
            if d.tail.size() != l {
                bail!("tail has {} slots, record says l = {l}", d.tail.size());
            }
            d.verify(&inst.config, &inst.system)?;
            Ok(())
        }
        "certificate" => {
            let (c, l) = parse_certificate_record(inst, value)?;
            c.verify(&inst.config, &inst.system, l)?;
            Ok(())
        }
        "good_decomposition" => {
            let g = parse_good_record(value)?;
            g.verify(&inst.config, &inst.system)?;
            Ok(())
        }
        "chain" => {
            let chain = parse_chain_record(value)?;
            verify_chain(&inst.config, &chain)?;
            if chain.members[0].total() != inst.system {
                bail!("chain decomposes a different system than the instance");
            }
            Ok(())
        }
        "qualification" => {
            match value.get("certificate") {
                Some(cert) => {
                    let (c, l) = parse_certificate_record(inst, cert)?;
                    c.verify(&inst.config, &inst.system, l)?;
                }
                None => {
                    let l = effective_tail(inst, None)?;
                    if let Qualification::Violated(_) =
                        is_qualified_bruteforce(&inst.config, &inst.system, l)?
                    {
                        bail!("record claims qualified, recheck disagrees");
                    }
                }
            }
            Ok(())
        }
        other => bail!("records of kind {other:?} are not verifiable"),
    }
}

// re-exported for the walk endpoint files and tests
pub use bruteforce::OracleBudget;
