//! Multi-index polynomial calculus and the assembly of the two potentials:
//! the homogeneous Q from flat pairing values, and the truncated L whose
//! coefficients come from derivatives of pairing values at a basepoint, one
//! good decomposition each, cross-checkable against all of them.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bruteforce::{all_good_decompositions_with_budget, OracleBudget};
use crate::equivalence::{good_decompose, GoodOutcome};
use crate::error::{Error, Result};
use crate::systems::{is_independent, Configuration, System};

/// T! = Π T(i)!, exact for total degrees up to the truncation cap.
pub fn system_factorial(system: &System) -> u128 {
    system.iter().map(|(_, c)| (1..=c as u128).product::<u128>()).product()
}

/// ∂_T applied to the monomial (z−x)^S: `None` when T ≰ S, otherwise the
/// integer coefficient S!/(S−T)! and the remaining exponent S−T.
pub fn monomial_derivative(t: &System, s: &System) -> Option<(u128, System)> {
    if !t.le(s) {
        return None;
    }
    let mut coeff = 1u128;
    for (i, ct) in t.iter() {
        let cs = s.count(i) as u128;
        for step in 0..ct as u128 {
            coeff *= cs - step;
        }
    }
    Some((coeff, s.minus(t).unwrap()))
}

/// A finitely supported polynomial Σ a_T (z−x)^T around a basepoint x ∈ ℝⁿ.
/// The coefficient map never stores exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexPolynomial {
    n: usize,
    basepoint: Vec<f64>,
    coeffs: BTreeMap<System, Complex64>,
}

impl MultiIndexPolynomial {
    pub fn new(n: usize, basepoint: Vec<f64>) -> MultiIndexPolynomial {
        assert_eq!(basepoint.len(), n);
        MultiIndexPolynomial { n, basepoint, coeffs: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn coefficient(&self, t: &System) -> Complex64 {
        self.coeffs.get(t).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set_coefficient(&mut self, t: System, value: Complex64) {
        if value.norm() == 0.0 {
            self.coeffs.remove(&t);
        } else {
            self.coeffs.insert(t, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&System, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|t| t.size()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &c) in &self.coeffs {
            let mut term = c;
            for (i, count) in t.iter() {
                let base = z[(i - 1) as usize] - self.basepoint[(i - 1) as usize];
                term *= Complex64::new(base, 0.0).powu(count);
            }
            acc += term;
        }
        acc
    }

    /// The formal derivative ∂_T, monomial by monomial.
    pub fn derivative(&self, t: &System) -> MultiIndexPolynomial {
        let mut out = MultiIndexPolynomial::new(self.n, self.basepoint.clone());
        for (s, &c) in &self.coeffs {
            if let Some((coeff, rest)) = monomial_derivative(t, s) {
                let prev = out.coefficient(&rest);
                out.set_coefficient(rest, prev + c * coeff as f64);
            }
        }
        out
    }

    /// (∂_T self)(x): every monomial above T vanishes at the basepoint, so
    /// this is T!·a_T.
    pub fn derivative_at_basepoint(&self, t: &System) -> Complex64 {
        self.coefficient(t) * system_factorial(t) as f64
    }
}

/// The numeric interface a structure supplies: flat pairing values on strong
/// mk-systems, pointwise pairing values, and basepoint derivatives. All
/// pairing calls are routed through total systems, so Higgs invariance is
/// structural.
pub trait StructureOracle {
    /// (n, k, m) of the underlying structure.
    fn order(&self) -> (usize, usize, usize);

    /// S(C_T ζ, ζ, ..., ζ) for a strong mk-system T; parameter-independent.
    fn s_flat(&self, t: &System) -> Result<Complex64>;

    /// S(C_T ζ, ζ, ..., ζ)(z).
    fn eval_s(&self, t: &System, z: &[f64]) -> Result<Complex64>;

    /// (∂_{T₁} S(C_{T₂} ζ, ζ, ..., ζ))(x).
    fn deriv_s(&self, t1: &System, t2: &System, x: &[f64]) -> Result<Complex64>;

    /// Achievable derivative accuracy, used as the default cross-check gate.
    fn derivative_tolerance(&self) -> f64 {
        1e-6
    }
}

/// A constant oracle; every flat value is `constant`, so every derivative of
/// positive order vanishes. Conforming at any truncation degree.
#[derive(Debug, Clone)]
pub struct MockOracle {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub constant: Complex64,
}

impl MockOracle {
    pub fn new(config: &Configuration, constant: Complex64) -> MockOracle {
        MockOracle { n: config.n(), k: config.k(), m: config.m(), constant }
    }
}

impl StructureOracle for MockOracle {
    fn order(&self) -> (usize, usize, usize) {
        (self.n, self.k, self.m)
    }

    fn s_flat(&self, _t: &System) -> Result<Complex64> {
        Ok(self.constant)
    }

    fn eval_s(&self, _t: &System, _z: &[f64]) -> Result<Complex64> {
        Ok(self.constant)
    }

    fn deriv_s(&self, t1: &System, _t2: &System, _x: &[f64]) -> Result<Complex64> {
        Ok(if t1.is_empty() { self.constant } else { Complex64::new(0.0, 0.0) })
    }

    fn derivative_tolerance(&self) -> f64 {
        1e-12
    }
}

fn check_oracle(config: &Configuration, oracle: &dyn StructureOracle) -> Result<()> {
    let (n, k, m) = oracle.order();
    if (n, k, m) != (config.n(), config.k(), config.m()) {
        return Err(Error::Oracle(format!(
            "oracle order ({n},{k},{m}) does not match the configuration ({},{},{})",
            config.n(),
            config.k(),
            config.m()
        )));
    }
    Ok(())
}

const MAX_TRUNCATION_DEGREE: usize = 20;

/// All multisets of the given size over 1..=n in lexicographic order.
fn multisets(n: usize, size: usize) -> Vec<System> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn go(n: u32, size: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<System>) {
        if cur.len() == size {
            out.push(System::from_pairs(cur.iter().map(|&i| (i, 1))));
            return;
        }
        for i in min..=n {
            cur.push(i);
            go(n, size, i, cur, out);
            cur.pop();
        }
    }
    go(n as u32, size, 1, &mut cur, &mut out);
    out
}

/// Every (mk+l)-multiset over J that admits a strong decomposition, in
/// lexicographic order.
pub fn enumerate_strong_systems(
    config: &Configuration,
    size: usize,
    l: usize,
) -> Result<Vec<System>> {
    let expected = config.m() * config.k() + l;
    if size != expected {
        return Err(Error::SizeMismatch { expected, got: size });
    }
    let mut out = Vec::new();
    for t in multisets(config.n(), size) {
        if crate::packing::strong_decompose(config, &t, l)?.is_decomposed() {
            out.push(t);
        }
    }
    Ok(out)
}

/// The homogeneous degree-mk potential: coefficient s_flat(T)/T! on every
/// strong mk-system T, zero elsewhere. Basepoint 0.
pub fn build_q(
    config: &Configuration,
    oracle: &dyn StructureOracle,
) -> Result<MultiIndexPolynomial> {
    check_oracle(config, oracle)?;
    let mk = config.m() * config.k();
    let mut q = MultiIndexPolynomial::new(config.n(), vec![0.0; config.n()]);
    for t in enumerate_strong_systems(config, mk, 0)? {
        let value = oracle.s_flat(&t)?;
        let coeff = value / system_factorial(&t) as f64;
        q.set_coefficient(t, coeff);
    }
    Ok(q)
}

/// One candidate value for a coefficient a_T, tagged by the good
/// decomposition that produced it.
#[derive(Debug, Clone)]
pub struct CandidateValue {
    pub t1: System,
    pub t2: System,
    pub value: Complex64,
}

/// Cross-check data for one coefficient.
#[derive(Debug, Clone)]
pub struct CoefficientRecord {
    pub system: System,
    pub used: Complex64,
    pub candidates: Vec<CandidateValue>,
    pub spread_abs: f64,
    /// Spread relative to max(1, largest candidate magnitude).
    pub spread_rel: f64,
}

/// Per-coefficient candidate spreads collected while building L.
#[derive(Debug, Clone, Default)]
pub struct ConsistencyReport {
    pub records: Vec<CoefficientRecord>,
    pub max_rel_spread: f64,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum BuildMode {
    /// Use the deterministic good decomposition only.
    FirstFound,
    /// Evaluate every good decomposition and error when the candidate
    /// spread exceeds the tolerance.
    CrossCheckAll { tolerance: f64 },
}

/// Builds the truncated second potential around x: for every T with
/// mk+1 ≤ |T| ≤ degree admitting a good decomposition, the coefficient
/// (∂_{T₁} S(C_{T₂}ζ, ...))(x) / T! from the deterministic witness; zero for
/// every other T.
pub fn build_l(
    config: &Configuration,
    oracle: &dyn StructureOracle,
    x: &[f64],
    degree: usize,
    mode: BuildMode,
) -> Result<(MultiIndexPolynomial, ConsistencyReport)> {
    check_oracle(config, oracle)?;
    let mk = config.m() * config.k();
    if degree < mk + 1 {
        return Err(Error::UnsupportedParameter(format!(
            "truncation degree {degree} is below mk+1 = {}",
            mk + 1
        )));
    }
    if degree > MAX_TRUNCATION_DEGREE {
        return Err(Error::UnsupportedParameter(format!(
            "truncation degree {degree} exceeds the exact-factorial cap {MAX_TRUNCATION_DEGREE}"
        )));
    }
    if x.len() != config.n() {
        return Err(Error::InvalidConfiguration(format!(
            "basepoint length {} does not match n = {}",
            x.len(),
            config.n()
        )));
    }
    let mut poly = MultiIndexPolynomial::new(config.n(), x.to_vec());
    let mut report = ConsistencyReport::default();
    if let BuildMode::CrossCheckAll { tolerance } = mode {
        report.tolerance = Some(tolerance);
    }
    let budget = OracleBudget::default();
    for size in (mk + 1)..=degree {
        for t in multisets(config.n(), size) {
            let good = match good_decompose(config, &t)? {
                GoodOutcome::Good(g) => g,
                GoodOutcome::Violation(_) => continue,
            };
            let factorial = system_factorial(&t) as f64;
            let used = oracle.deriv_s(&good.t1, &good.t2, x)? / factorial;
            poly.set_coefficient(t.clone(), used);

            if let BuildMode::CrossCheckAll { tolerance } = mode {
                let all = all_good_decompositions_with_budget(config, &t, &budget)?;
                let mut candidates = Vec::with_capacity(all.len());
                for g in &all {
                    let value = oracle.deriv_s(&g.t1, &g.t2, x)? / factorial;
                    candidates.push(CandidateValue {
                        t1: g.t1.clone(),
                        t2: g.t2.clone(),
                        value,
                    });
                }
                let mut spread_abs = 0.0f64;
                for a in &candidates {
                    for b in &candidates {
                        spread_abs = spread_abs.max((a.value - b.value).norm());
                    }
                }
                let scale =
                    candidates.iter().map(|c| c.value.norm()).fold(0.0, f64::max).max(1.0);
                let spread_rel = spread_abs / scale;
                report.max_rel_spread = report.max_rel_spread.max(spread_rel);
                report.records.push(CoefficientRecord {
                    system: t.clone(),
                    used,
                    candidates,
                    spread_abs,
                    spread_rel,
                });
                if spread_rel > tolerance {
                    return Err(Error::InconsistentCandidates {
                        system: t.to_string(),
                        spread: spread_rel,
                        tolerance,
                    });
                }
            }
        }
    }
    Ok((poly, report))
}

/// One compared derivative in a verification report.
#[derive(Debug, Clone)]
pub struct DeviationEntry {
    pub system: System,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs: f64,
    /// Deviation relative to max(1, |rhs|).
    pub rel: f64,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub q_entries: Vec<DeviationEntry>,
    pub l_entries: Vec<DeviationEntry>,
    pub max_q_abs: f64,
    pub max_q_rel: f64,
    pub max_l_abs: f64,
    pub max_l_rel: f64,
}

fn entry(system: System, lhs: Complex64, rhs: Complex64) -> DeviationEntry {
    let abs = (lhs - rhs).norm();
    let rel = abs / rhs.norm().max(1.0);
    DeviationEntry { system, lhs, rhs, abs, rel }
}

/// All independent index sets of the configuration, ascending.
pub fn independent_sets(config: &Configuration) -> Vec<Vec<u32>> {
    fn go(config: &Configuration, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == config.k() {
            if is_independent(config, cur) {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..=config.n() as u32 {
            cur.push(i);
            go(config, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(config, 1, &mut Vec::new(), &mut out);
    out
}

/// Compares formal derivatives of the built potentials against oracle
/// values over sampled tuples of independent sets: full-order derivatives of
/// Q against flat values, and basepoint derivatives of L against pointwise
/// values on [i] + ΣI_j. Report-only.
pub fn verify_potentials(
    config: &Configuration,
    oracle: &dyn StructureOracle,
    q: &MultiIndexPolynomial,
    l: &MultiIndexPolynomial,
    sample_cap: usize,
) -> Result<VerificationReport> {
    check_oracle(config, oracle)?;
    let sets = independent_sets(config);
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    fn tuple_go(count: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..count {
            cur.push(i);
            tuple_go(count, m, i, cur, out);
            cur.pop();
        }
    }
    tuple_go(sets.len(), config.m(), 0, &mut Vec::new(), &mut tuples);
    tuples.truncate(sample_cap);

    let mut report = VerificationReport::default();
    for tuple in &tuples {
        let mut total = System::empty();
        for &si in tuple {
            for &i in &sets[si] {
                total.add(i, 1);
            }
        }
        let lhs = q.derivative_at_basepoint(&total);
        let rhs = oracle.s_flat(&total)?;
        let e = entry(total.clone(), lhs, rhs);
        report.max_q_abs = report.max_q_abs.max(e.abs);
        report.max_q_rel = report.max_q_rel.max(e.rel);
        report.q_entries.push(e);

        for i in 1..=config.n() as u32 {
            let mut constrained = total.clone();
            constrained.add(i, 1);
            if constrained.size() > l.degree().max(config.m() * config.k() + 1) {
                continue;
            }
            let lhs = l.derivative_at_basepoint(&constrained);
            let rhs = oracle.eval_s(&constrained, l.basepoint())?;
            let e = entry(constrained, lhs, rhs);
            report.max_l_abs = report.max_l_abs.max(e.abs);
            report.max_l_rel = report.max_l_rel.max(e.rel);
            report.l_entries.push(e);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{ArrangementModel, ArrangementOracle};
    use crate::exactlin::FieldTag;
    use crate::systems::config_a;
    use approx::assert_abs_diff_eq;

    fn line_config(n: usize) -> Configuration {
        let q = FieldTag::Rationals;
        Configuration::new(q.clone(), 1, 2, vec![vec![q.from_i64(1)]; n]).unwrap()
    }

    fn two_point_oracle() -> ArrangementOracle {
        let model =
            ArrangementModel::from_real(vec![vec![1.0], vec![1.0]], vec![1.0, 1.0], vec![0.0, 2.0])
                .unwrap();
        ArrangementOracle::new(model)
    }

    #[test]
    fn monomial_derivative_cases() {
        let t = System::singleton(1);
        let s = System::of(&[(1, 2)]);
        assert_eq!(monomial_derivative(&t, &s), Some((2, System::singleton(1))));
        assert_eq!(monomial_derivative(&s, &t), None);
        let (coeff, rest) = monomial_derivative(&s, &s).unwrap();
        assert_eq!(coeff, 2);
        assert!(rest.is_empty());
        assert_eq!(system_factorial(&System::of(&[(1, 3), (2, 2)])), 12);
    }

    #[test]
    fn strong_system_enumeration() {
        let cfg = line_config(2);
        let strong = enumerate_strong_systems(&cfg, 2, 0).unwrap();
        assert_eq!(
            strong,
            vec![System::of(&[(1, 2)]), System::of(&[(1, 1), (2, 1)]), System::of(&[(2, 2)])]
        );

        let cfg_a = config_a();
        let strong = enumerate_strong_systems(&cfg_a, 4, 0).unwrap();
        assert!(strong.contains(&System::of(&[(1, 1), (2, 1), (3, 1), (4, 1)])));
        assert!(!strong.contains(&System::of(&[(1, 2), (4, 2)])));

        // a zero vector never joins a basis
        let q = FieldTag::Rationals;
        let zero_cfg =
            Configuration::new(q.clone(), 1, 2, vec![vec![q.from_i64(1)], vec![q.zero()]])
                .unwrap();
        let strong = enumerate_strong_systems(&zero_cfg, 2, 0).unwrap();
        assert_eq!(strong, vec![System::of(&[(1, 2)])]);
    }

    #[test]
    fn q_from_two_point_arrangement() {
        let cfg = line_config(2);
        let q = build_q(&cfg, &two_point_oracle()).unwrap();
        assert_abs_diff_eq!(q.coefficient(&System::of(&[(1, 2)])).re, -0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(
            q.coefficient(&System::of(&[(1, 1), (2, 1)])).re,
            0.5,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(q.coefficient(&System::of(&[(2, 2)])).re, -0.25, epsilon = 1e-10);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn q_from_mock_oracles() {
        let cfg = config_a();
        let zero = MockOracle::new(&cfg, Complex64::new(0.0, 0.0));
        assert!(build_q(&cfg, &zero).unwrap().is_empty());

        let ones = MockOracle::new(&cfg, Complex64::new(1.0, 0.0));
        let q = build_q(&cfg, &ones).unwrap();
        let t_a = System::of(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        assert_eq!(q.coefficient(&t_a), Complex64::new(1.0, 0.0));
        assert_eq!(q.coefficient(&System::of(&[(1, 2), (4, 2)])), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn l_coefficients_match_the_closed_form() {
        // a_{3[1]} = S(C_{3[1]}ζ,ζ)(x)/3! = 1/12 and, by symbolic
        // differentiation of S(C_{[1]+2[2]}ζ,ζ) = −a₁a₂/(z₁−z₂),
        // a_{2[1]+2[2]} = (a₁a₂/(z₁−z₂)²)/4 = 1/16 at a=(1,1), x=(0,2).
        let cfg = line_config(2);
        let oracle = two_point_oracle();
        let (l, report) = build_l(
            &cfg,
            &oracle,
            &[0.0, 2.0],
            4,
            BuildMode::CrossCheckAll { tolerance: 1e-5 },
        )
        .unwrap();
        assert_abs_diff_eq!(
            l.coefficient(&System::of(&[(1, 3)])).re,
            1.0 / 12.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            l.coefficient(&System::of(&[(1, 2), (2, 2)])).re,
            1.0 / 16.0,
            epsilon = 1e-7
        );
        let record = report
            .records
            .iter()
            .find(|r| r.system == System::of(&[(1, 2), (2, 2)]))
            .unwrap();
        assert_eq!(record.candidates.len(), 2);
        assert!(record.spread_rel < 1e-7, "spread {}", record.spread_rel);
    }

    #[test]
    fn l_zero_fills_unreachable_systems() {
        let q = FieldTag::Rationals;
        // v₂ = 0: that vector fills at most the one tail slot, so systems
        // with two or more copies of index 2 admit no good decomposition
        let cfg = Configuration::new(q.clone(), 1, 2, vec![vec![q.from_i64(1)], vec![q.zero()]])
            .unwrap();
        let oracle = MockOracle::new(&cfg, Complex64::new(1.0, 0.0));
        let (l, _) = build_l(&cfg, &oracle, &[0.0, 2.0], 3, BuildMode::FirstFound).unwrap();
        assert_eq!(l.coefficient(&System::of(&[(1, 1), (2, 2)])), Complex64::new(0.0, 0.0));
        assert_eq!(l.coefficient(&System::of(&[(2, 3)])), Complex64::new(0.0, 0.0));
        // one zero slot is fine: it becomes the witness tail
        assert_eq!(l.coefficient(&System::of(&[(1, 2), (2, 1)])), Complex64::new(0.5, 0.0));
        assert_eq!(l.coefficient(&System::of(&[(1, 3)])), Complex64::new(1.0 / 6.0, 0.0));
    }

    #[test]
    fn constraint_systems_always_admit_good_decompositions() {
        // zero-filled coefficients never collide with a constraint: every
        // [i] + ΣI_j admits the good decomposition with witness tail [i]
        let cfg = config_a();
        let sets = independent_sets(&cfg);
        for s1 in &sets {
            for s2 in &sets {
                for i in 1..=cfg.n() as u32 {
                    let mut t = System::singleton(i);
                    for &j in s1.iter().chain(s2) {
                        t.add(j, 1);
                    }
                    assert!(matches!(
                        good_decompose(&cfg, &t).unwrap(),
                        GoodOutcome::Good(_)
                    ));
                }
            }
        }
    }

    #[test]
    fn verify_q_is_exact_for_the_mock() {
        // dyadic coefficients round-trip div/mul by T! without rounding
        let cfg = config_a();
        let oracle = MockOracle::new(&cfg, Complex64::new(1.0, 0.0));
        let q = build_q(&cfg, &oracle).unwrap();
        let (l, _) = build_l(&cfg, &oracle, &[0.0; 4], 5, BuildMode::FirstFound).unwrap();
        let report = verify_potentials(&cfg, &oracle, &q, &l, 200).unwrap();
        assert_eq!(report.max_q_abs, 0.0);
        assert!(!report.q_entries.is_empty());
    }

    #[test]
    fn verify_l_matches_pointwise_values() {
        let cfg = line_config(2);
        let oracle = two_point_oracle();
        let q = build_q(&cfg, &oracle).unwrap();
        let (l, _) = build_l(&cfg, &oracle, &[0.0, 2.0], 3, BuildMode::FirstFound).unwrap();
        let report = verify_potentials(&cfg, &oracle, &q, &l, 100).unwrap();
        assert!(report.max_l_rel < 1e-9, "L deviation {}", report.max_l_rel);
        assert!(report.max_q_rel < 1e-9, "Q deviation {}", report.max_q_rel);
    }

    #[test]
    fn verify_flags_a_corrupted_coefficient() {
        let cfg = line_config(2);
        let oracle = two_point_oracle();
        let q = build_q(&cfg, &oracle).unwrap();
        let (mut l, _) = build_l(&cfg, &oracle, &[0.0, 2.0], 3, BuildMode::FirstFound).unwrap();
        let target = System::of(&[(1, 3)]);
        let bumped = l.coefficient(&target) + Complex64::new(0.25, 0.0);
        l.set_coefficient(target, bumped);
        let report = verify_potentials(&cfg, &oracle, &q, &l, 100).unwrap();
        assert!(report.max_l_abs > 1.0, "corruption must surface, got {}", report.max_l_abs);
    }

    #[test]
    fn cross_check_rejects_a_broken_oracle() {
        // an oracle whose derivative depends on the decomposition route
        struct Skewed(ArrangementOracle);
        impl StructureOracle for Skewed {
            fn order(&self) -> (usize, usize, usize) {
                self.0.order()
            }
            fn s_flat(&self, t: &System) -> Result<Complex64> {
                self.0.s_flat(t)
            }
            fn eval_s(&self, t: &System, z: &[f64]) -> Result<Complex64> {
                self.0.eval_s(t, z)
            }
            fn deriv_s(&self, t1: &System, t2: &System, x: &[f64]) -> Result<Complex64> {
                let skew = if t1.count(2) > 0 { 0.5 } else { 0.0 };
                Ok(self.0.deriv_s(t1, t2, x)? + Complex64::new(skew, 0.0))
            }
        }
        let cfg = line_config(2);
        let skewed = Skewed(two_point_oracle());
        let err = build_l(&cfg, &skewed, &[0.0, 2.0], 4, BuildMode::CrossCheckAll {
            tolerance: 1e-5,
        });
        assert!(matches!(err, Err(Error::InconsistentCandidates { .. })));
    }
}
