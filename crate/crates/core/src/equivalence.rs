//! Good decompositions and the constructive walk connecting any two of them
//! through verifiable single-tail exchanges.

use crate::error::{Error, Result};
use crate::packing::{split_into_bases, strong_decompose, SplitOutcome, ViolationCertificate};
use crate::systems::{d_h, Configuration, Decomposition, System};

/// T = T₁ + T₂ with T₂ a strong (mk+1)-system, carrying the strongness
/// witness (m bases plus a singleton tail).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodDecomposition {
    pub t1: System,
    pub t2: System,
    pub witness: Decomposition,
}

impl GoodDecomposition {
    pub fn total(&self) -> System {
        self.t1.plus(&self.t2)
    }

    pub fn verify(&self, config: &Configuration, total: &System) -> Result<()> {
        if &self.total() != total {
            return Err(Error::InvalidConfiguration(
                "good decomposition does not resum to the ambient system".into(),
            ));
        }
        let expected = config.m() * config.k() + 1;
        if self.t2.size() != expected {
            return Err(Error::SizeMismatch { expected, got: self.t2.size() });
        }
        if self.witness.tail.size() != 1 {
            return Err(Error::InvalidConfiguration(
                "strongness witness must carry a singleton tail".into(),
            ));
        }
        self.witness.verify(config, &self.t2)
    }
}

/// Two good decompositions whose T₂-parts admit strong decompositions
/// sharing all m basis parts, differing only in the tail element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRelationWitness {
    pub left: GoodDecomposition,
    pub right: GoodDecomposition,
    pub shared_parts: Vec<System>,
    pub left_tail: System,
    pub right_tail: System,
}

impl LocalRelationWitness {
    fn swapped(&self) -> LocalRelationWitness {
        LocalRelationWitness {
            left: self.right.clone(),
            right: self.left.clone(),
            shared_parts: self.shared_parts.clone(),
            left_tail: self.right_tail.clone(),
            right_tail: self.left_tail.clone(),
        }
    }

    pub fn verify(&self, config: &Configuration) -> Result<()> {
        if self.shared_parts.len() != config.m() {
            return Err(Error::SizeMismatch { expected: config.m(), got: self.shared_parts.len() });
        }
        let left_dec = Decomposition {
            parts: self.shared_parts.clone(),
            tail: self.left_tail.clone(),
        };
        left_dec.verify(config, &self.left.t2)?;
        let right_dec = Decomposition {
            parts: self.shared_parts.clone(),
            tail: self.right_tail.clone(),
        };
        right_dec.verify(config, &self.right.t2)?;
        if self.left_tail.size() != 1 || self.right_tail.size() != 1 {
            return Err(Error::InvalidConfiguration(
                "local relation tails must be singletons".into(),
            ));
        }
        Ok(())
    }
}

/// A chain of good decompositions with consecutive members locally related
/// through the stored witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkChain {
    pub members: Vec<GoodDecomposition>,
    pub witnesses: Vec<LocalRelationWitness>,
}

/// Either a verified good decomposition or a certificate that none exists.
#[derive(Debug, Clone)]
pub enum GoodOutcome {
    Good(GoodDecomposition),
    Violation(ViolationCertificate),
}

impl GoodOutcome {
    pub fn good(&self) -> Option<&GoodDecomposition> {
        match self {
            GoodOutcome::Good(g) => Some(g),
            GoodOutcome::Violation(_) => None,
        }
    }
}

/// Produces a good decomposition of T deterministically: strong-decompose
/// with the full tail budget, keep the smallest tail slot inside T₂ and move
/// the rest of the tail into T₁.
///
/// T admits a good decomposition exactly when it is strong with
/// l = |T| − mk: a strong decomposition donates its parts and one tail
/// element to T₂, and conversely a good decomposition extends its witness by
/// the T₁ elements into a full strong decomposition. A certificate therefore
/// rules out every good decomposition.
pub fn good_decompose(config: &Configuration, system: &System) -> Result<GoodOutcome> {
    let mk = config.m() * config.k();
    if system.size() < mk + 1 {
        return Err(Error::SizeMismatch { expected: mk + 1, got: system.size() });
    }
    let l = system.size() - mk;
    match strong_decompose(config, system, l)? {
        SplitOutcome::Violation(c) => Ok(GoodOutcome::Violation(c)),
        SplitOutcome::Decomposed(d) => {
            let kept = d.tail.expand_slots()[0].index;
            let t1 = d.tail.minus(&System::singleton(kept)).unwrap();
            let witness =
                Decomposition { parts: d.parts, tail: System::singleton(kept) };
            let t2 = witness.total();
            let good = GoodDecomposition { t1, t2, witness };
            good.verify(config, system)?;
            Ok(GoodOutcome::Good(good))
        }
    }
}

/// The case analysis driving the walk: for two strong (mk+1)-systems S₂ and
/// T₂, either T₂ has a strong decomposition whose tail [i] satisfies
/// T₂(i) > S₂(i) (case α), or both admit strong decompositions with one
/// common tail element (case β).
#[derive(Debug, Clone)]
pub enum Lemma33Case {
    Alpha { i: u32, witness_t2: Decomposition },
    Beta { a: u32, witness_t2: Decomposition, witness_s2: Decomposition },
}

pub fn lemma33_step(config: &Configuration, s2: &System, t2: &System) -> Result<Lemma33Case> {
    let expected = config.m() * config.k() + 1;
    for sys in [s2, t2] {
        if sys.size() != expected {
            return Err(Error::SizeMismatch { expected, got: sys.size() });
        }
    }
    if let SplitOutcome::Violation(_) = strong_decompose(config, t2, 1)? {
        return Err(Error::InvalidConfiguration("T₂ is not strong".into()));
    }
    for i in t2.support() {
        if t2.count(i) > s2.count(i) {
            let rest = t2.minus(&System::singleton(i)).unwrap();
            if let SplitOutcome::Decomposed(d) = split_into_bases(config, &rest)? {
                let witness_t2 =
                    Decomposition { parts: d.parts, tail: System::singleton(i) };
                return Ok(Lemma33Case::Alpha { i, witness_t2 });
            }
        }
    }
    let witness_s2 = match strong_decompose(config, s2, 1)? {
        SplitOutcome::Decomposed(d) => d,
        SplitOutcome::Violation(_) => {
            return Err(Error::InvalidConfiguration("S₂ is not strong".into()))
        }
    };
    let a = witness_s2.tail.expand_slots()[0].index;
    let rest = t2
        .minus(&System::singleton(a))
        .expect("the common tail element lies in supp T₂ when case α fails");
    let witness_t2 = match split_into_bases(config, &rest)? {
        SplitOutcome::Decomposed(d) => {
            Decomposition { parts: d.parts, tail: System::singleton(a) }
        }
        SplitOutcome::Violation(_) => {
            unreachable!("the common tail element serves T₂ when case α fails")
        }
    };
    Ok(Lemma33Case::Beta { a, witness_t2, witness_s2 })
}

fn smallest_index_with<F: Fn(u32) -> bool>(a: &System, b: &System, pred: F) -> Option<u32> {
    let mut indices: Vec<u32> = a.support().chain(b.support()).collect();
    indices.sort_unstable();
    indices.dedup();
    indices.into_iter().find(|&i| pred(i))
}

/// Connects two good decompositions of the same system by a verified chain
/// of local moves. Each loop iteration contracts the tail distance d_H of
/// the two active T₂-systems by exactly 2.
pub fn walk(
    config: &Configuration,
    left: &GoodDecomposition,
    right: &GoodDecomposition,
) -> Result<WalkChain> {
    if config.m() < 2 {
        return Err(Error::UnsupportedParameter(
            "the walk between good decompositions needs m ≥ 2".into(),
        ));
    }
    let total = left.total();
    if right.total() != total {
        return Err(Error::InvalidConfiguration(
            "the two good decompositions split different systems".into(),
        ));
    }
    left.verify(config, &total)?;
    right.verify(config, &total)?;

    let initial_distance = d_h(&left.t2, &right.t2);
    let mut left_chain = vec![left.clone()];
    let mut right_chain = vec![right.clone()];
    let mut left_witnesses: Vec<LocalRelationWitness> = Vec::new();
    let mut right_witnesses: Vec<LocalRelationWitness> = Vec::new();
    let mut distance = initial_distance;

    while left_chain.last().unwrap().t2 != right_chain.last().unwrap().t2 {
        let lcur = left_chain.last().unwrap().clone();
        let rcur = right_chain.last().unwrap().clone();
        match lemma33_step(config, &rcur.t2, &lcur.t2)? {
            Lemma33Case::Alpha { i, witness_t2 } => {
                let j = smallest_index_with(&lcur.t2, &rcur.t2, |j| {
                    lcur.t2.count(j) < rcur.t2.count(j)
                })
                .expect("tails of equal size that differ have a deficient index");
                assert!(lcur.t1.count(j) > rcur.t1.count(j));
                let t1 = lcur.t1.minus(&System::singleton(j)).unwrap().plus(&System::singleton(i));
                let t2 = lcur.t2.plus(&System::singleton(j)).minus(&System::singleton(i)).unwrap();
                let witness = Decomposition {
                    parts: witness_t2.parts.clone(),
                    tail: System::singleton(j),
                };
                let next = GoodDecomposition { t1, t2, witness };
                next.verify(config, &total)?;
                assert_eq!(
                    d_h(&next.t2, &rcur.t2),
                    distance - 2,
                    "an α-move contracts the tail distance by exactly 2"
                );
                left_witnesses.push(LocalRelationWitness {
                    left: lcur,
                    right: next.clone(),
                    shared_parts: witness_t2.parts,
                    left_tail: System::singleton(i),
                    right_tail: System::singleton(j),
                });
                left_chain.push(next);
            }
            Lemma33Case::Beta { a, witness_t2, witness_s2 } => {
                let b = smallest_index_with(&lcur.t2, &rcur.t2, |x| {
                    lcur.t2.count(x) < rcur.t2.count(x)
                })
                .expect("differing tails of equal size yield an exchange element b");
                let c = smallest_index_with(&lcur.t2, &rcur.t2, |x| {
                    lcur.t2.count(x) > rcur.t2.count(x)
                })
                .expect("differing tails of equal size yield an exchange element c");
                assert_ne!(c, a, "case β forbids a surplus at the common tail element");
                if b != a {
                    let t1 =
                        lcur.t1.minus(&System::singleton(b)).unwrap().plus(&System::singleton(a));
                    let t2 =
                        lcur.t2.plus(&System::singleton(b)).minus(&System::singleton(a)).unwrap();
                    let witness = Decomposition {
                        parts: witness_t2.parts.clone(),
                        tail: System::singleton(b),
                    };
                    let next = GoodDecomposition { t1, t2, witness };
                    next.verify(config, &total)?;
                    left_witnesses.push(LocalRelationWitness {
                        left: lcur,
                        right: next.clone(),
                        shared_parts: witness_t2.parts,
                        left_tail: System::singleton(a),
                        right_tail: System::singleton(b),
                    });
                    left_chain.push(next);
                }
                let t1 = rcur.t1.minus(&System::singleton(c)).unwrap().plus(&System::singleton(a));
                let t2 = rcur.t2.plus(&System::singleton(c)).minus(&System::singleton(a)).unwrap();
                let witness = Decomposition {
                    parts: witness_s2.parts.clone(),
                    tail: System::singleton(c),
                };
                let next = GoodDecomposition { t1, t2, witness };
                next.verify(config, &total)?;
                right_witnesses.push(LocalRelationWitness {
                    left: rcur,
                    right: next.clone(),
                    shared_parts: witness_s2.parts,
                    left_tail: System::singleton(a),
                    right_tail: System::singleton(c),
                });
                right_chain.push(next);
                assert_eq!(
                    d_h(&left_chain.last().unwrap().t2, &right_chain.last().unwrap().t2),
                    distance - 2,
                    "a β-move contracts the tail distance by exactly 2"
                );
            }
        }
        distance -= 2;
    }

    let junction_left = left_chain.last().unwrap();
    let junction_right = right_chain.last().unwrap();
    assert_eq!(junction_left.t1, junction_right.t1);
    assert_eq!(junction_left.t2, junction_right.t2);

    let mut members = left_chain;
    let mut witnesses = left_witnesses;
    for idx in (0..right_chain.len() - 1).rev() {
        members.push(right_chain[idx].clone());
        witnesses.push(right_witnesses[idx].swapped());
    }
    assert!(
        members.len() <= initial_distance + 1,
        "the chain never exceeds d_H(left.T₂, right.T₂) + 1 members"
    );
    let chain = WalkChain { members, witnesses };
    verify_chain(config, &chain)?;
    Ok(chain)
}

/// Mechanical re-verification of a chain: every member is a good
/// decomposition of one common system and every stored witness links its
/// neighbours. Returns the first defect found.
pub fn verify_chain(config: &Configuration, chain: &WalkChain) -> Result<()> {
    let Some(first) = chain.members.first() else {
        return Err(Error::ChainInvalid("chain has no members".into()));
    };
    let total = first.total();
    for (idx, member) in chain.members.iter().enumerate() {
        member
            .verify(config, &total)
            .map_err(|e| Error::ChainInvalid(format!("member {idx}: {e}")))?;
    }
    if chain.witnesses.len() + 1 != chain.members.len() {
        return Err(Error::ChainInvalid(format!(
            "{} members need {} witnesses, found {}",
            chain.members.len(),
            chain.members.len() - 1,
            chain.witnesses.len()
        )));
    }
    for (idx, witness) in chain.witnesses.iter().enumerate() {
        let here = &chain.members[idx];
        let next = &chain.members[idx + 1];
        if witness.left.t1 != here.t1 || witness.left.t2 != here.t2 {
            return Err(Error::ChainInvalid(format!(
                "witness {idx} does not start at member {idx}"
            )));
        }
        if witness.right.t1 != next.t1 || witness.right.t2 != next.t2 {
            return Err(Error::ChainInvalid(format!(
                "witness {idx} does not end at member {}",
                idx + 1
            )));
        }
        witness
            .verify(config)
            .map_err(|e| Error::ChainInvalid(format!("witness {idx}: {e}")))?;
    }
    Ok(())
}

pub fn chain_is_valid(config: &Configuration, chain: &WalkChain) -> bool {
    verify_chain(config, chain).is_ok()
}

/// Decision procedure for the local relation, used by tests only; the walk
/// itself produces witnesses directly. Two good decompositions are locally
/// related exactly when their T₂-systems coincide, or differ by one exchange
/// whose shared mk-part splits into m bases.
pub fn is_locally_related(
    config: &Configuration,
    x: &GoodDecomposition,
    y: &GoodDecomposition,
) -> Result<bool> {
    if x.total() != y.total() {
        return Ok(false);
    }
    if x.t2 == y.t2 {
        return Ok(true);
    }
    if d_h(&x.t2, &y.t2) != 2 {
        return Ok(false);
    }
    let surplus = smallest_index_with(&x.t2, &y.t2, |i| x.t2.count(i) > y.t2.count(i))
        .expect("distance 2 forces a surplus index");
    let shared = x.t2.minus(&System::singleton(surplus)).unwrap();
    Ok(split_into_bases(config, &shared)?.is_decomposed())
}
