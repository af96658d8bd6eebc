//! Built-in randomized smoke checks, a fast subset of the acceptance suite.

use rand::Rng;
use serde_json::{json, Value};

use basepack_core::arrangement::{self, ArrangementModel};
use basepack_core::bruteforce::{
    all_splits_with_budget, local_relation_graph_with_budget, OracleBudget,
};
use basepack_core::corpus;
use basepack_core::equivalence::{chain_is_valid, walk};
use basepack_core::packing::{is_qualified_bruteforce, strong_decompose, SplitOutcome};
use basepack_core::systems::d_h;

pub fn run(seed: u64, trials: usize) -> anyhow::Result<Value> {
    let mut rng = corpus::rng_from_seed(seed);
    let budget = OracleBudget::default();
    let mut checks = Vec::new();

    // exchange driver vs. exhaustive oracles
    let mut agreement = true;
    let mut detail = String::new();
    for trial in 0..trials {
        let field = corpus::random_field(&mut rng);
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=2.min(n));
        let m = 2;
        let l = rng.gen_range(0..=1);
        let config = corpus::random_configuration(&mut rng, &field, n, k, m);
        let system = corpus::random_system(&mut rng, n, m * k + l);
        let split = strong_decompose(&config, &system, l)?;
        let qualified = is_qualified_bruteforce(&config, &system, l)?.is_qualified();
        let oracle_nonempty = !all_splits_with_budget(&config, &system, l, &budget)?.is_empty();
        let verdicts_agree = split.is_decomposed() == qualified && qualified == oracle_nonempty;
        let record_ok = match &split {
            SplitOutcome::Decomposed(d) => d.verify(&config, &system).is_ok(),
            SplitOutcome::Violation(c) => c.verify(&config, &system, l).is_ok(),
        };
        if !(verdicts_agree && record_ok) {
            agreement = false;
            detail = format!("trial {trial}: T = {system} over {field}");
            break;
        }
    }
    checks.push(json!({
        "name": "split_matches_exhaustive_oracles",
        "pass": agreement,
        "detail": if agreement { format!("{trials} random instances") } else { detail },
    }));

    // walks between random good decompositions
    let mut walked = 0usize;
    let mut walk_ok = true;
    let mut walk_detail = String::new();
    while walked < trials / 2 {
        let field = corpus::random_field(&mut rng);
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=2.min(n));
        let config = corpus::random_configuration(&mut rng, &field, n, k, 2);
        let size = 2 * k + rng.gen_range(1..=2);
        let system = corpus::random_system(&mut rng, n, size);
        let nodes =
            basepack_core::bruteforce::all_good_decompositions_with_budget(&config, &system, &budget)?;
        if nodes.len() < 2 {
            continue;
        }
        walked += 1;
        let left = &nodes[0];
        let right = &nodes[nodes.len() - 1];
        let chain = walk(&config, left, right)?;
        let bound = d_h(&left.t2, &right.t2) + 1;
        if !chain_is_valid(&config, &chain) || chain.members.len() > bound {
            walk_ok = false;
            walk_detail = format!("T = {system}");
            break;
        }
    }
    checks.push(json!({
        "name": "walks_verify",
        "pass": walk_ok,
        "detail": if walk_ok { format!("{walked} walked pairs") } else { walk_detail },
    }));

    // exhaustive local-relation graphs stay connected
    let mut graphs = 0usize;
    let mut connected_ok = true;
    while graphs < trials / 2 {
        let field = corpus::random_field(&mut rng);
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=2.min(n));
        let config = corpus::random_configuration(&mut rng, &field, n, k, 2);
        let size = 2 * k + rng.gen_range(1..=2);
        let system = corpus::random_system(&mut rng, n, size);
        let graph = local_relation_graph_with_budget(&config, &system, &budget)?;
        if graph.nodes.is_empty() {
            continue;
        }
        graphs += 1;
        if !graph.connected {
            connected_ok = false;
            break;
        }
    }
    checks.push(json!({
        "name": "relation_graphs_connected",
        "pass": connected_ok,
        "detail": format!("{graphs} graphs"),
    }));

    // arrangement anchor: two points on a line
    let mut anchor_ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a1 = rng.gen_range(0.3..2.5);
        let a2 = rng.gen_range(0.3..2.5);
        let z1 = rng.gen_range(-2.0..2.0);
        let z2 = z1 + rng.gen_range(0.5..2.5);
        let model =
            ArrangementModel::from_real(vec![vec![1.0], vec![1.0]], vec![a1, a2], vec![z1, z2])?;
        let s = arrangement::oracle_eval_s(
            &model,
            &basepack_core::System::of(&[(1, 2)]),
            &[z1, z2],
        )?;
        let expected = -a1 * a2 / (a1 + a2);
        worst = worst.max((s.re - expected).abs()).max(s.im.abs());
        let crit = arrangement::critical_points(&model, &[z1, z2])?;
        worst = worst.max(arrangement::kernel_residual(&model, &crit));
    }
    if worst > 1e-9 {
        anchor_ok = false;
    }
    checks.push(json!({
        "name": "arrangement_anchor",
        "pass": anchor_ok,
        "detail": format!("max deviation {worst:.3e}"),
    }));

    let pass = checks.iter().all(|c| c["pass"].as_bool().unwrap_or(false));
    Ok(json!({
        "kind": "selftest",
        "seed": seed,
        "checks": checks,
        "pass": pass,
    }))
}
