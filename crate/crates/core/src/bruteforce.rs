//! Exhaustive oracles for acceptance testing. These share no algorithm code
//! with the main modules: independence is decided by minor expansion, and
//! decompositions come from enumerating every slot assignment.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::equivalence::GoodDecomposition;
use crate::error::{Error, Result};
use crate::exactlin::{Scalar, VectorF};
use crate::systems::{Configuration, Decomposition, Slot, System};

/// Size limits enforced before any enumeration starts.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_slots: usize,
    pub max_support: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_slots: 12, max_support: 10 }
    }
}

impl OracleBudget {
    fn admit(&self, system: &System) -> Result<()> {
        if system.size() > self.max_slots {
            return Err(Error::BudgetExceeded(format!(
                "system has {} slots, budget allows {}",
                system.size(),
                self.max_slots
            )));
        }
        let support = system.support().count();
        if support > self.max_support {
            return Err(Error::BudgetExceeded(format!(
                "system has support {}, budget allows {}",
                support, self.max_support
            )));
        }
        Ok(())
    }
}

fn det(rows: &[Vec<Scalar>]) -> Scalar {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc: Option<Scalar> = None;
    for (i, row) in rows.iter().enumerate() {
        if row[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> = rows
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        let mut term = &row[0] * &det(&minor);
        if i % 2 == 1 {
            term = -term;
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.unwrap_or_else(|| rows[0][0].field().zero())
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    go(0, n, r, &mut cur, &mut out);
    out
}

/// Rank by exhaustive minor expansion, limited to ambient dimension 4.
pub fn minor_rank(rows: &[VectorF]) -> Result<usize> {
    let k = rows.first().map(|r| r.len()).unwrap_or(0);
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: r.len() });
        }
    }
    if k > 4 {
        return Err(Error::BudgetExceeded(
            "minor-expansion rank handles ambient dimension at most 4".into(),
        ));
    }
    for order in (1..=rows.len().min(k)).rev() {
        for rowset in combinations(rows.len(), order) {
            for colset in combinations(k, order) {
                let sub: Vec<Vec<Scalar>> = rowset
                    .iter()
                    .map(|&r| colset.iter().map(|&c| rows[r][c].clone()).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return Ok(order);
                }
            }
        }
    }
    Ok(0)
}

fn slots_form_basis(config: &Configuration, slots: &[Slot]) -> Result<bool> {
    if slots.len() != config.k() {
        return Ok(false);
    }
    let rows: Vec<VectorF> = slots.iter().map(|s| config.vector(s.index).clone()).collect();
    Ok(minor_rank(&rows)? == config.k())
}

/// Every decomposition of T into m labeled k-parts (all bases) plus an
/// l-tail, enumerated over slot assignments and deduplicated at the system
/// level; returned in lexicographic order.
pub fn all_splits(config: &Configuration, system: &System, l: usize) -> Result<Vec<Decomposition>> {
    all_splits_with_budget(config, system, l, &OracleBudget::default())
}

pub fn all_splits_with_budget(
    config: &Configuration,
    system: &System,
    l: usize,
    budget: &OracleBudget,
) -> Result<Vec<Decomposition>> {
    let expected = config.m() * config.k() + l;
    if system.size() != expected {
        return Err(Error::SizeMismatch { expected, got: system.size() });
    }
    budget.admit(system)?;
    let slots = system.expand_slots();
    let mut found: BTreeSet<(Vec<System>, System)> = BTreeSet::new();
    let mut parts_acc: Vec<Vec<Slot>> = Vec::new();
    assign(config, &slots, &mut parts_acc, &mut found)?;
    Ok(found
        .into_iter()
        .map(|(parts, tail)| Decomposition { parts, tail })
        .collect())
}

fn assign(
    config: &Configuration,
    remaining: &[Slot],
    parts_acc: &mut Vec<Vec<Slot>>,
    found: &mut BTreeSet<(Vec<System>, System)>,
) -> Result<()> {
    if parts_acc.len() == config.m() {
        let parts: Vec<System> = parts_acc.iter().map(|p| System::from_slots(p)).collect();
        found.insert((parts, System::from_slots(remaining)));
        return Ok(());
    }
    for subset in combinations(remaining.len(), config.k()) {
        let part: Vec<Slot> = subset.iter().map(|&i| remaining[i]).collect();
        if !slots_form_basis(config, &part)? {
            continue;
        }
        let rest: Vec<Slot> = remaining
            .iter()
            .enumerate()
            .filter(|(i, _)| !subset.contains(i))
            .map(|(_, s)| *s)
            .collect();
        parts_acc.push(part);
        assign(config, &rest, parts_acc, found)?;
        parts_acc.pop();
    }
    Ok(())
}

/// Enumerates every subsystem T₂ ≤ T of size mk+1 in lexicographic order.
fn subsystems_of_size(system: &System, size: usize) -> Vec<System> {
    let support: Vec<(u32, u32)> = system.iter().collect();
    let mut out = Vec::new();
    let mut cur: Vec<(u32, u32)> = Vec::new();
    fn go(
        support: &[(u32, u32)],
        pos: usize,
        left: usize,
        cur: &mut Vec<(u32, u32)>,
        out: &mut Vec<System>,
    ) {
        if left == 0 {
            out.push(System::from_pairs(cur.iter().copied()));
            return;
        }
        if pos == support.len() {
            return;
        }
        let (index, avail) = support[pos];
        let take_max = (avail as usize).min(left);
        for take in 0..=take_max {
            if take > 0 {
                cur.push((index, take as u32));
            }
            go(support, pos + 1, left - take, cur, out);
            if take > 0 {
                cur.pop();
            }
        }
    }
    go(&support, 0, size, &mut cur, &mut out);
    out.sort();
    out
}

/// All good decompositions of T: every T₂ ≤ T with |T₂| = mk+1 whose splits
/// are nonempty, each witnessed by its first split.
pub fn all_good_decompositions(
    config: &Configuration,
    system: &System,
) -> Result<Vec<GoodDecomposition>> {
    all_good_decompositions_with_budget(config, system, &OracleBudget::default())
}

pub fn all_good_decompositions_with_budget(
    config: &Configuration,
    system: &System,
    budget: &OracleBudget,
) -> Result<Vec<GoodDecomposition>> {
    let mk1 = config.m() * config.k() + 1;
    if system.size() < mk1 {
        return Err(Error::SizeMismatch { expected: mk1, got: system.size() });
    }
    budget.admit(system)?;
    let candidates = subsystems_of_size(system, mk1);
    let nodes: Vec<Option<GoodDecomposition>> = candidates
        .par_iter()
        .map(|t2| {
            let splits = all_splits_with_budget(config, t2, 1, budget).ok()?;
            let witness = splits.into_iter().next()?;
            Some(GoodDecomposition {
                t1: system.minus(t2).unwrap(),
                t2: t2.clone(),
                witness,
            })
        })
        .collect();
    Ok(nodes.into_iter().flatten().collect())
}

/// The local-relation graph over all good decompositions, with edges found
/// by exhaustive shared-part search, plus its connectivity verdict. Graphs
/// with at most one node count as connected.
#[derive(Debug, Clone)]
pub struct RelationGraph {
    pub nodes: Vec<GoodDecomposition>,
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
}

pub fn local_relation_graph(config: &Configuration, system: &System) -> Result<RelationGraph> {
    local_relation_graph_with_budget(config, system, &OracleBudget::default())
}

pub fn local_relation_graph_with_budget(
    config: &Configuration,
    system: &System,
    budget: &OracleBudget,
) -> Result<RelationGraph> {
    let nodes = all_good_decompositions_with_budget(config, system, budget)?;
    // fingerprint: the sorted m-part lists of every strong decomposition of T₂
    let fingerprints: Vec<BTreeSet<Vec<System>>> = nodes
        .par_iter()
        .map(|node| {
            let splits = all_splits_with_budget(config, &node.t2, 1, budget)?;
            Ok(splits
                .into_iter()
                .map(|d| {
                    let mut parts = d.parts;
                    parts.sort();
                    parts
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if fingerprints[i].intersection(&fingerprints[j]).next().is_some() {
                edges.push((i, j));
            }
        }
    }
    let connected = {
        let n = nodes.len();
        if n <= 1 {
            true
        } else {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &(a, b) in &edges {
                    let w = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        }
    };
    Ok(RelationGraph { nodes, edges, connected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::config_a;

    #[test]
    fn all_splits_of_t_a() {
        // the two assignments pairing the parallel slots 1 and 4 fail
        let cfg = config_a();
        let t_a = System::of(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let splits = all_splits(&cfg, &t_a, 0).unwrap();
        assert_eq!(splits.len(), 4);
        for d in &splits {
            d.verify(&cfg, &t_a).unwrap();
            assert!(!d.parts.contains(&System::of(&[(1, 1), (4, 1)])));
        }
    }

    #[test]
    fn all_splits_empty_for_parallel_overload() {
        let cfg = config_a();
        let t_b = System::of(&[(1, 2), (2, 1), (4, 1)]);
        assert!(all_splits(&cfg, &t_b, 0).unwrap().is_empty());
    }

    #[test]
    fn all_splits_dedupes_equal_slot_assignments() {
        let q = crate::exactlin::FieldTag::Rationals;
        let cfg = Configuration::new(q.clone(), 1, 2, vec![vec![q.from_i64(3)]]).unwrap();
        let splits = all_splits(&cfg, &System::of(&[(1, 2)]), 0).unwrap();
        assert_eq!(splits.len(), 1);
        assert_eq!(splits[0].parts, vec![System::singleton(1), System::singleton(1)]);
    }

    #[test]
    fn good_decompositions_of_t_d() {
        let cfg = config_a();
        let t_d = System::of(&[(1, 1), (2, 2), (3, 2), (4, 1)]);
        let nodes = all_good_decompositions(&cfg, &t_d).unwrap();
        assert_eq!(nodes.len(), 4);
        let mut t1s: Vec<System> = nodes.iter().map(|n| n.t1.clone()).collect();
        t1s.sort();
        assert_eq!(
            t1s,
            vec![
                System::singleton(1),
                System::singleton(2),
                System::singleton(3),
                System::singleton(4)
            ]
        );
        for node in &nodes {
            node.verify(&cfg, &t_d).unwrap();
        }
    }

    #[test]
    fn single_good_decomposition_when_forced() {
        let cfg = config_a();
        let t_c = System::of(&[(1, 1), (2, 2), (3, 1), (4, 1)]);
        assert_eq!(all_good_decompositions(&cfg, &t_c).unwrap().len(), 1);
        let bad = System::of(&[(1, 3), (4, 2)]);
        assert!(all_good_decompositions(&cfg, &bad).unwrap().is_empty());
    }

    #[test]
    fn relation_graph_of_t_d_is_connected() {
        let cfg = config_a();
        let t_d = System::of(&[(1, 1), (2, 2), (3, 2), (4, 1)]);
        let graph = local_relation_graph(&cfg, &t_d).unwrap();
        assert_eq!(graph.nodes.len(), 4);
        assert!(graph.connected);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = config_a();
        let big = System::of(&[(1, 10), (2, 10)]);
        let tight = OracleBudget { max_slots: 8, max_support: 8 };
        assert!(matches!(
            all_splits_with_budget(&cfg, &big, 16, &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn minor_rank_limits() {
        let q = crate::exactlin::FieldTag::Rationals;
        let wide: Vec<VectorF> = vec![(0..5).map(|i| q.from_i64(i)).collect()];
        assert!(matches!(minor_rank(&wide), Err(Error::BudgetExceeded(_))));
    }
}
