//! Multiset systems over the index set J = {1..n}, their metric and order
//! structure, and the bridge from index systems to vector systems.
//!
//! Indices are 1-based externally, matching J; slots make multiple copies of
//! an index distinct without changing any span or independence relation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactlin::{rank, FieldTag, Scalar, SubspaceRep, VectorF};

/// The ambient data shared by all combinatorial operations: the field, the
/// dimension k of V, the index count n, the number m of bases, and the
/// vectors v₁..vₙ (which must span V).
#[derive(Debug, Clone)]
pub struct Configuration {
    field: FieldTag,
    k: usize,
    n: usize,
    m: usize,
    vectors: Vec<VectorF>,
}

impl Configuration {
    pub fn new(
        field: FieldTag,
        k: usize,
        m: usize,
        vectors: Vec<VectorF>,
    ) -> Result<Configuration> {
        let n = vectors.len();
        if k < 1 {
            return Err(Error::InvalidConfiguration("k must be at least 1".into()));
        }
        if m < 1 {
            return Err(Error::InvalidConfiguration("m must be at least 1".into()));
        }
        if n < k {
            return Err(Error::InvalidConfiguration(format!(
                "need at least k = {k} vectors, got {n}"
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != k {
                return Err(Error::InvalidConfiguration(format!(
                    "vector v{} has length {}, expected {k}",
                    i + 1,
                    v.len()
                )));
            }
        }
        let r = rank(&vectors)?;
        if r != k {
            return Err(Error::InvalidConfiguration(format!(
                "vectors span a subspace of dimension {r} < k = {k}"
            )));
        }
        Ok(Configuration { field, k, n, m, vectors })
    }

    pub fn field(&self) -> &FieldTag {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vectors(&self) -> &[VectorF] {
        &self.vectors
    }

    /// The vector attached to a 1-based index.
    pub fn vector(&self, index: u32) -> &VectorF {
        &self.vectors[(index - 1) as usize]
    }

    pub fn vector_is_zero(&self, index: u32) -> bool {
        self.vector(index).iter().all(Scalar::is_zero)
    }

    /// Same data with a different number of bases.
    pub fn with_m(&self, m: usize) -> Result<Configuration> {
        Configuration::new(self.field.clone(), self.k, m, self.vectors.clone())
    }
}

/// A finitely supported multiset over J with positive multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct System {
    counts: BTreeMap<u32, u32>,
}

impl System {
    pub fn empty() -> System {
        System::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> System {
        let mut counts = BTreeMap::new();
        for (i, c) in pairs {
            if c > 0 {
                *counts.entry(i).or_insert(0) += c;
            }
        }
        System { counts }
    }

    /// Σ c_j·[i_j] written as `[(i, c), ...]`; a convenience for tests.
    pub fn of(pairs: &[(u32, u32)]) -> System {
        System::from_pairs(pairs.iter().copied())
    }

    pub fn singleton(index: u32) -> System {
        System::from_pairs([(index, 1)])
    }

    pub fn count(&self, index: u32) -> u32 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.counts.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    pub fn plus(&self, other: &System) -> System {
        let mut counts = self.counts.clone();
        for (&i, &c) in &other.counts {
            *counts.entry(i).or_insert(0) += c;
        }
        System { counts }
    }

    pub fn add(&mut self, index: u32, count: u32) {
        if count > 0 {
            *self.counts.entry(index).or_insert(0) += count;
        }
    }

    /// Pointwise difference; `None` if `other ≰ self`.
    pub fn minus(&self, other: &System) -> Option<System> {
        let mut counts = self.counts.clone();
        for (&i, &c) in &other.counts {
            let have = counts.get_mut(&i)?;
            if *have < c {
                return None;
            }
            *have -= c;
            if *have == 0 {
                counts.remove(&i);
            }
        }
        Some(System { counts })
    }

    /// The partial ordering S ≤ T: S(a) ≤ T(a) for every a.
    pub fn le(&self, other: &System) -> bool {
        self.counts.iter().all(|(&i, &c)| other.count(i) >= c)
    }

    /// Expansion into distinct (index, copy) slots, ordered by index then copy.
    pub fn expand_slots(&self) -> SlotList {
        let mut slots = Vec::with_capacity(self.size());
        for (&i, &c) in &self.counts {
            for copy in 1..=c {
                slots.push(Slot { index: i, copy });
            }
        }
        slots
    }

    pub fn from_slots(slots: &[Slot]) -> System {
        System::from_pairs(slots.iter().map(|s| (s.index, 1)))
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&i, &c) in &self.counts {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if c == 1 {
                write!(f, "[{i}]")?;
            } else {
                write!(f, "{c}[{i}]")?;
            }
        }
        Ok(())
    }
}

/// One occurrence of an index inside an expanded system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub index: u32,
    pub copy: u32,
}

pub type SlotList = Vec<Slot>;

/// m parts of size k plus an l-tail; strongness of the parts is a checked
/// property, not an invariant of the record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: Vec<System>,
    pub tail: System,
}

impl Decomposition {
    pub fn total(&self) -> System {
        self.parts.iter().fold(self.tail.clone(), |acc, p| acc.plus(p))
    }

    /// Checks that this is a strong decomposition of `system`: m parts, each
    /// an independent basis of V, summing with the tail to the system.
    pub fn verify(&self, config: &Configuration, system: &System) -> Result<()> {
        if self.parts.len() != config.m() {
            return Err(Error::SizeMismatch { expected: config.m(), got: self.parts.len() });
        }
        for (j, part) in self.parts.iter().enumerate() {
            if part.size() != config.k() {
                return Err(Error::SizeMismatch { expected: config.k(), got: part.size() });
            }
            let rows: Vec<VectorF> =
                part.expand_slots().iter().map(|s| config.vector(s.index).clone()).collect();
            if rank(&rows)? != config.k() {
                return Err(Error::InvalidConfiguration(format!(
                    "part {} = {} is not a basis",
                    j + 1,
                    part
                )));
            }
        }
        if &self.total() != system {
            return Err(Error::InvalidConfiguration(
                "parts and tail do not resum to the decomposed system".into(),
            ));
        }
        Ok(())
    }
}

/// μ(T, U): total multiplicity of T's support inside the subspace U.
pub fn mu(config: &Configuration, system: &System, subspace: &SubspaceRep) -> usize {
    system
        .iter()
        .filter(|&(i, _)| subspace.contains(config.vector(i)))
        .map(|(_, c)| c as usize)
        .sum()
}

/// The L¹ distance between count maps; a metric on systems.
pub fn d_h(a: &System, b: &System) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    a.support()
        .chain(b.support())
        .filter(|&i| seen.insert(i))
        .map(|i| a.count(i).abs_diff(b.count(i)) as usize)
        .sum()
}

/// Whether I indexes a basis of V: exactly k distinct indices whose vectors
/// are independent.
pub fn is_independent(config: &Configuration, index_set: &[u32]) -> bool {
    if index_set.len() != config.k() {
        return false;
    }
    let mut sorted = index_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != config.k() {
        return false;
    }
    let rows: Vec<VectorF> = sorted.iter().map(|&i| config.vector(i).clone()).collect();
    rank(&rows).map(|r| r == config.k()).unwrap_or(false)
}

/// The pushforward multiset v^sys(T) over V; equal vectors merge.
pub fn v_sys(config: &Configuration, system: &System) -> Vec<(VectorF, u32)> {
    let mut merged: BTreeMap<VectorF, u32> = BTreeMap::new();
    for (i, c) in system.iter() {
        *merged.entry(config.vector(i).clone()).or_insert(0) += c;
    }
    merged.into_iter().collect()
}

#[cfg(test)]
pub(crate) fn config_a() -> Configuration {
    let q = FieldTag::Rationals;
    let v = |a: i64, b: i64| vec![q.from_i64(a), q.from_i64(b)];
    Configuration::new(q, 2, 2, vec![v(1, 0), v(0, 1), v(1, 1), v(1, 0)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::SubspaceRep;
    use proptest::prelude::*;

    #[test]
    fn mu_counts_support_inside_subspace() {
        let cfg = config_a();
        let t = System::of(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let line =
            SubspaceRep::from_spanning(&[cfg.vector(1).clone()], 2).unwrap();
        assert_eq!(mu(&cfg, &t, &line), 2);
        let full =
            SubspaceRep::from_spanning(&[cfg.vector(1).clone(), cfg.vector(2).clone()], 2)
                .unwrap();
        assert_eq!(mu(&cfg, &t, &full), t.size());
        assert_eq!(mu(&cfg, &t, &SubspaceRep::zero(2)), 0);
    }

    #[test]
    fn metric_examples() {
        assert_eq!(d_h(&System::of(&[(1, 2)]), &System::of(&[(1, 1), (2, 1)])), 2);
        let t = System::of(&[(1, 1), (3, 2)]);
        assert_eq!(d_h(&t, &t), 0);
        assert_eq!(d_h(&System::of(&[(1, 1), (2, 1)]), &System::of(&[(2, 2)])), 2);
    }

    #[test]
    fn independence_examples() {
        let cfg = config_a();
        assert!(is_independent(&cfg, &[1, 2]));
        assert!(!is_independent(&cfg, &[1, 4]));
        assert!(!is_independent(&cfg, &[1]));
        assert!(!is_independent(&cfg, &[2, 2]));
    }

    #[test]
    fn pushforward_merges_equal_vectors() {
        let cfg = config_a();
        let merged = v_sys(&cfg, &System::of(&[(1, 1), (4, 1)]));
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].1, 2);
        let single = v_sys(&cfg, &System::of(&[(2, 1)]));
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].0, cfg.vector(2).clone());
    }

    #[test]
    fn slot_expansion_is_sorted_and_distinct() {
        let t = System::of(&[(2, 2), (1, 1)]);
        let slots = t.expand_slots();
        assert_eq!(
            slots,
            vec![
                Slot { index: 1, copy: 1 },
                Slot { index: 2, copy: 1 },
                Slot { index: 2, copy: 2 }
            ]
        );
        assert_eq!(System::from_slots(&slots), t);
    }

    #[test]
    fn configuration_rejects_deficient_vectors() {
        let q = FieldTag::Rationals;
        let v = |a: i64, b: i64| vec![q.from_i64(a), q.from_i64(b)];
        let err = Configuration::new(q, 2, 2, vec![v(1, 0), v(2, 0)]);
        assert!(err.is_err());
    }

    fn arb_system(n: u32, max_count: u32) -> impl Strategy<Value = System> {
        prop::collection::btree_map(1..=n, 0..=max_count, 0..=n as usize)
            .prop_map(System::from_pairs)
    }

    proptest! {
        #[test]
        fn metric_axioms(a in arb_system(5, 3), b in arb_system(5, 3), c in arb_system(5, 3)) {
            prop_assert_eq!(d_h(&a, &b), d_h(&b, &a));
            prop_assert_eq!(d_h(&a, &a), 0);
            prop_assert!(d_h(&a, &c) <= d_h(&a, &b) + d_h(&b, &c));
            if d_h(&a, &b) == 0 {
                prop_assert_eq!(&a, &b);
            }
        }

        #[test]
        fn order_respects_size(a in arb_system(5, 3), b in arb_system(5, 3)) {
            if a.le(&b) && a.size() == b.size() {
                prop_assert_eq!(&a, &b);
            }
            let sum = a.plus(&b);
            prop_assert!(a.le(&sum) && b.le(&sum));
            prop_assert_eq!(sum.minus(&b), Some(a.clone()));
        }

        #[test]
        fn tail_distance_parity(t1 in arb_system(4, 2), t2 in arb_system(4, 2), s2 in arb_system(4, 2)) {
            // whenever T1+T2 = S1+S2 with |T2| = |S2|, d_H(T2,S2) is even
            let total = t1.plus(&t2);
            if s2.le(&total) && s2.size() == t2.size() {
                prop_assert_eq!(d_h(&t2, &s2) % 2, 0);
            }
        }
    }
}
