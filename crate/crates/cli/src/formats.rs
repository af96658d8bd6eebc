//! Instance and arrangement file parsing plus JSON rendering. Output keys
//! are sorted and rationals print as strings, so documents are byte-stable
//! for fixed inputs.

use anyhow::{anyhow, bail, Context};
use serde_json::{json, Map, Value};

use basepack_core::arrangement::{ArrangementModel, Tolerances};
use basepack_core::equivalence::{GoodDecomposition, LocalRelationWitness, WalkChain};
use basepack_core::packing::ViolationCertificate;
use basepack_core::potential::{ConsistencyReport, MultiIndexPolynomial, VerificationReport};
use basepack_core::{Complex64, Configuration, Decomposition, FieldTag, Scalar, System};

pub struct Instance {
    pub config: Configuration,
    pub system: System,
    pub tail_budget: Option<usize>,
}

fn parse_field(value: &Value) -> anyhow::Result<FieldTag> {
    match value {
        Value::String(s) if s == "rationals" => Ok(FieldTag::Rationals),
        Value::Object(map) => {
            let p = map
                .get("prime")
                .and_then(Value::as_u64)
                .ok_or_else(|| anyhow!("field object needs a \"prime\" number"))?;
            Ok(FieldTag::new_prime(p)?)
        }
        other => bail!("field must be \"rationals\" or {{\"prime\": p}}, got {other}"),
    }
}

fn parse_scalar(field: &FieldTag, value: &Value) -> anyhow::Result<Scalar> {
    match value {
        Value::String(s) => Ok(field.parse(s)?),
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| anyhow!("scalar {n} is not an integer; write it as \"p/q\""))?;
            Ok(field.from_i64(i))
        }
        other => bail!("scalar must be an integer or a \"p/q\" string, got {other}"),
    }
}

pub fn parse_system(value: &Value, n: usize) -> anyhow::Result<System> {
    let map = value.as_object().ok_or_else(|| anyhow!("system must be an index→count object"))?;
    let mut system = System::empty();
    for (key, count) in map {
        let index: u32 = key.parse().with_context(|| format!("bad index key {key:?}"))?;
        if index == 0 || index as usize > n {
            bail!("index {index} outside 1..={n}");
        }
        let count = count
            .as_u64()
            .ok_or_else(|| anyhow!("count for index {index} must be a nonnegative integer"))?;
        if count == 0 {
            bail!("index {index} carries multiplicity 0; omit it instead");
        }
        system.add(index, count as u32);
    }
    Ok(system)
}

pub fn parse_instance(text: &str) -> anyhow::Result<Instance> {
    let doc: Value = serde_json::from_str(text).context("instance file is not valid JSON")?;
    let obj = doc.as_object().ok_or_else(|| anyhow!("instance file must be a JSON object"))?;
    let field = parse_field(obj.get("field").ok_or_else(|| anyhow!("missing \"field\""))?)?;
    let k = obj
        .get("k")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing or non-integer \"k\""))? as usize;
    let m = obj
        .get("m")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing or non-integer \"m\""))? as usize;
    let vectors_value = obj
        .get("vectors")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"vectors\" array"))?;
    let mut vectors = Vec::with_capacity(vectors_value.len());
    for (i, row) in vectors_value.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| anyhow!("vector {} must be an array of scalars", i + 1))?;
        let parsed: Vec<Scalar> = row
            .iter()
            .map(|v| parse_scalar(&field, v))
            .collect::<anyhow::Result<_>>()
            .with_context(|| format!("in vector {}", i + 1))?;
        vectors.push(parsed);
    }
    if let Some(n) = obj.get("n").and_then(Value::as_u64) {
        if n as usize != vectors.len() {
            bail!("\"n\" = {n} disagrees with {} vectors", vectors.len());
        }
    }
    let config = Configuration::new(field, k, m, vectors)?;
    let system = parse_system(
        obj.get("system").ok_or_else(|| anyhow!("missing \"system\""))?,
        config.n(),
    )?;
    let tail_budget = match obj.get("l") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64().ok_or_else(|| anyhow!("\"l\" must be a nonnegative integer"))? as usize,
        ),
    };
    Ok(Instance { config, system, tail_budget })
}

fn parse_complex(value: &Value) -> anyhow::Result<Complex64> {
    match value {
        Value::Number(x) => Ok(Complex64::new(
            x.as_f64().ok_or_else(|| anyhow!("bad number {x}"))?,
            0.0,
        )),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| anyhow!("bad real part"))?;
            let im = pair[1].as_f64().ok_or_else(|| anyhow!("bad imaginary part"))?;
            Ok(Complex64::new(re, im))
        }
        other => bail!("expected a number or an [re, im] pair, got {other}"),
    }
}

pub fn parse_arrangement(text: &str) -> anyhow::Result<ArrangementModel> {
    let doc: Value = serde_json::from_str(text).context("arrangement file is not valid JSON")?;
    let obj = doc.as_object().ok_or_else(|| anyhow!("arrangement file must be a JSON object"))?;
    let b_rows = obj
        .get("b")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"b\" matrix"))?;
    let mut b = Vec::with_capacity(b_rows.len());
    for (i, row) in b_rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| anyhow!("row {} of b must be an array", i + 1))?;
        b.push(
            row.iter()
                .map(parse_complex)
                .collect::<anyhow::Result<Vec<_>>>()
                .with_context(|| format!("in row {} of b", i + 1))?,
        );
    }
    let weights = obj
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"weights\""))?
        .iter()
        .map(parse_complex)
        .collect::<anyhow::Result<Vec<_>>>()
        .context("in weights")?;
    let basepoint: Vec<f64> = obj
        .get("basepoint")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"basepoint\""))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| anyhow!("basepoint entries must be real numbers")))
        .collect::<anyhow::Result<_>>()?;
    let mut model = ArrangementModel::new(b, weights, basepoint)?;
    if let Some(step) = obj.get("fd_step") {
        let step = step.as_f64().ok_or_else(|| anyhow!("\"fd_step\" must be a number"))?;
        if step <= 0.0 {
            bail!("\"fd_step\" must be positive");
        }
        model = model.with_fd_step(step);
    }
    if let Some(tols) = obj.get("tolerances") {
        let tols = tols.as_object().ok_or_else(|| anyhow!("\"tolerances\" must be an object"))?;
        let mut t = Tolerances::default();
        let read = |map: &Map<String, Value>, key: &str, slot: &mut f64| -> anyhow::Result<()> {
            if let Some(v) = map.get(key) {
                *slot = v.as_f64().ok_or_else(|| anyhow!("tolerance {key} must be a number"))?;
            }
            Ok(())
        };
        read(tols, "gradient", &mut t.gradient)?;
        read(tols, "hessian_min", &mut t.hessian_min)?;
        read(tols, "factor_min", &mut t.factor_min)?;
        read(tols, "kernel", &mut t.kernel)?;
        read(tols, "separation", &mut t.separation)?;
        model = model.with_tolerances(t);
    }
    Ok(model)
}

pub fn system_json(system: &System) -> Value {
    Value::Array(
        system.iter().map(|(i, c)| json!([i, c])).collect(),
    )
}

pub fn parse_system_pairs(value: &Value) -> anyhow::Result<System> {
    // the inverse of system_json, used when records are fed back to verify
    let arr = value.as_array().ok_or_else(|| anyhow!("expected [[index, count], ...]"))?;
    let mut system = System::empty();
    for entry in arr {
        let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
            anyhow!("system entries must be [index, count] pairs, got {entry}")
        })?;
        let i = pair[0].as_u64().ok_or_else(|| anyhow!("bad index in {entry}"))? as u32;
        let c = pair[1].as_u64().ok_or_else(|| anyhow!("bad count in {entry}"))? as u32;
        if c == 0 {
            bail!("zero multiplicity in {entry}");
        }
        system.add(i, c);
    }
    Ok(system)
}

pub fn decomposition_json(d: &Decomposition, l: usize) -> Value {
    json!({
        "kind": "decomposition",
        "l": l,
        "parts": d.parts.iter().map(system_json).collect::<Vec<_>>(),
        "tail": system_json(&d.tail),
    })
}

pub fn certificate_json(c: &ViolationCertificate) -> Value {
    json!({
        "kind": "certificate",
        "support": c.support_subset,
        "subspace": {
            "dim": c.subspace.dim,
            "rref_basis": c.subspace.rref_basis.iter()
                .map(|row| row.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        },
        "mu": c.mu_value,
        "bound": c.bound,
    })
}

pub fn good_json(g: &GoodDecomposition) -> Value {
    json!({
        "kind": "good_decomposition",
        "t1": system_json(&g.t1),
        "t2": system_json(&g.t2),
        "witness": decomposition_json(&g.witness, 1),
    })
}

fn witness_json(w: &LocalRelationWitness) -> Value {
    json!({
        "shared_parts": w.shared_parts.iter().map(system_json).collect::<Vec<_>>(),
        "left_tail": system_json(&w.left_tail),
        "right_tail": system_json(&w.right_tail),
    })
}

pub fn chain_json(chain: &WalkChain) -> Value {
    json!({
        "kind": "chain",
        "members": chain.members.iter().map(good_json).collect::<Vec<_>>(),
        "witnesses": chain.witnesses.iter().map(witness_json).collect::<Vec<_>>(),
    })
}

pub fn polynomial_json(p: &MultiIndexPolynomial) -> Value {
    json!({
        "kind": "polynomial",
        "variables": p.n(),
        "basepoint": p.basepoint(),
        "coefficients": p.iter().map(|(t, c)| json!({
            "system": system_json(t),
            "re": c.re,
            "im": c.im,
        })).collect::<Vec<_>>(),
    })
}

pub fn consistency_json(report: &ConsistencyReport) -> Value {
    json!({
        "max_rel_spread": report.max_rel_spread,
        "tolerance": report.tolerance,
        "records": report.records.iter().map(|r| json!({
            "system": system_json(&r.system),
            "candidates": r.candidates.len(),
            "spread_abs": r.spread_abs,
            "spread_rel": r.spread_rel,
        })).collect::<Vec<_>>(),
    })
}

pub fn verification_json(report: &VerificationReport) -> Value {
    json!({
        "q_checks": report.q_entries.len(),
        "l_checks": report.l_entries.len(),
        "max_q_abs": report.max_q_abs,
        "max_q_rel": report.max_q_rel,
        "max_l_abs": report.max_l_abs,
        "max_l_rel": report.max_l_rel,
    })
}

/// Reconstructs a good decomposition from a `{"t1": .., "t2": ..}` document,
/// deriving the strongness witness deterministically.
pub fn parse_good_decomposition(
    config: &Configuration,
    total: &System,
    value: &Value,
) -> anyhow::Result<GoodDecomposition> {
    let obj = value.as_object().ok_or_else(|| anyhow!("expected an object with t1 and t2"))?;
    let t1 = match obj.get("t1") {
        Some(Value::Object(_)) => parse_system(obj.get("t1").unwrap(), config.n())?,
        Some(v) => parse_system_pairs(v)?,
        None => bail!("missing \"t1\""),
    };
    let t2 = match obj.get("t2") {
        Some(Value::Object(_)) => parse_system(obj.get("t2").unwrap(), config.n())?,
        Some(v) => parse_system_pairs(v)?,
        None => bail!("missing \"t2\""),
    };
    if &t1.plus(&t2) != total {
        bail!("t1 + t2 does not equal the instance system");
    }
    use basepack_core::packing::{strong_decompose, SplitOutcome};
    let witness = match strong_decompose(config, &t2, 1)? {
        SplitOutcome::Decomposed(d) => d,
        SplitOutcome::Violation(_) => bail!("t2 is not a strong (mk+1)-system"),
    };
    let good = GoodDecomposition { t1, t2, witness };
    good.verify(config, total)?;
    Ok(good)
}
