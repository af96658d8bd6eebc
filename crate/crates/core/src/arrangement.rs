//! A weighted hyperplane-arrangement model as a numerical structure oracle:
//! master-function critical points, Higgs values, the residue pairing, and
//! finite-difference derivatives. The k = 1 path is certified (exactly n−1
//! critical points or a near-discriminant error); k ≥ 2 is experimental.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::StructureOracle;
use crate::systems::System;

/// Numerical acceptance thresholds for critical-point data.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative gradient residual accepted at a critical point.
    pub gradient: f64,
    /// Minimum |det Hess| before a point counts as degenerate.
    pub hessian_min: f64,
    /// Minimum |f_i| before a point counts as on a hyperplane.
    pub factor_min: f64,
    /// Kernel identity residual Σ_i b_i^j p_i reported as a failure above this.
    pub kernel: f64,
    /// Minimum pairwise separation of hyperplane points (k = 1) and of
    /// critical points, relative to scale.
    pub separation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gradient: 1e-10,
            hessian_min: 1e-10,
            factor_min: 1e-10,
            kernel: 1e-10,
            separation: 1e-8,
        }
    }
}

/// The weighted arrangement data: an n×k coefficient matrix B with nonzero
/// rows and rank k, nonzero weights, and a basepoint off the discriminant.
/// The pairing order m is fixed to 2.
#[derive(Debug, Clone)]
pub struct ArrangementModel {
    b: Vec<Vec<Complex64>>,
    weights: Vec<Complex64>,
    n: usize,
    k: usize,
    basepoint: Vec<f64>,
    fd_step: f64,
    max_fd_order: usize,
    tol: Tolerances,
    unchecked_weights: bool,
}

fn complex_rank(rows: &[Vec<Complex64>], k: usize) -> usize {
    let mut m: Vec<Vec<Complex64>> = rows.to_vec();
    let scale: f64 =
        m.iter().flat_map(|r| r.iter().map(|c| c.norm())).fold(0.0, f64::max).max(1.0);
    let eps = 1e-12 * scale;
    let mut rank = 0usize;
    for col in 0..k {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| {
            m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap()
        }) else {
            break;
        };
        if m[p][col].norm() <= eps {
            continue;
        }
        m.swap(rank, p);
        let pivot = m[rank][col];
        for i in 0..m.len() {
            if i != rank {
                let factor = m[i][col] / pivot;
                for c in 0..k {
                    let delta = factor * m[rank][c];
                    m[i][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl ArrangementModel {
    pub fn new(
        b: Vec<Vec<Complex64>>,
        weights: Vec<Complex64>,
        basepoint: Vec<f64>,
    ) -> Result<ArrangementModel> {
        let n = b.len();
        let k = b.first().map(|r| r.len()).unwrap_or(0);
        if k < 1 || n <= k {
            return Err(Error::InvalidConfiguration(format!(
                "arrangement needs n > k ≥ 1, got n = {n}, k = {k}"
            )));
        }
        for (i, row) in b.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidConfiguration(format!(
                    "row {} has length {}, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().all(|c| c.norm() == 0.0) {
                return Err(Error::InvalidConfiguration(format!("row {} is zero", i + 1)));
            }
        }
        if complex_rank(&b, k) != k {
            return Err(Error::InvalidConfiguration("coefficient matrix has rank < k".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidConfiguration(format!(
                "expected {n} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| w.norm() == 0.0) {
            return Err(Error::InvalidConfiguration("weights must be nonzero".into()));
        }
        if basepoint.len() != n {
            return Err(Error::InvalidConfiguration(format!(
                "expected a basepoint in C^{n}, got length {}",
                basepoint.len()
            )));
        }
        let unchecked_weights =
            weights.iter().any(|w| w.im != 0.0 || w.re <= 0.0);
        Ok(ArrangementModel {
            b,
            weights,
            n,
            k,
            basepoint,
            fd_step: 1e-2,
            max_fd_order: 3,
            tol: Tolerances::default(),
            unchecked_weights,
        })
    }

    pub fn from_real(b: Vec<Vec<f64>>, weights: Vec<f64>, basepoint: Vec<f64>) -> Result<Self> {
        ArrangementModel::new(
            b.into_iter().map(|r| r.into_iter().map(|x| Complex64::new(x, 0.0)).collect()).collect(),
            weights.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            basepoint,
        )
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        self.fd_step = fd_step;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// True when the weights fall outside the positive real cone the
    /// unbalancedness default relies on; such models run unchecked.
    pub fn weights_unchecked(&self) -> bool {
        self.unchecked_weights
    }

    fn factor(&self, i: usize, z: &[f64], t: &[Complex64]) -> Complex64 {
        let mut f = Complex64::new(z[i], 0.0);
        for j in 0..self.k {
            f += self.b[i][j] * t[j];
        }
        f
    }

    fn gradient(&self, z: &[f64], t: &[Complex64]) -> Vec<Complex64> {
        (0..self.k)
            .map(|j| {
                (0..self.n)
                    .map(|i| self.weights[i] * self.b[i][j] / self.factor(i, z, t))
                    .sum()
            })
            .collect()
    }

    fn hessian(&self, z: &[f64], t: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.k)
            .map(|j| {
                (0..self.k)
                    .map(|l| {
                        -(0..self.n)
                            .map(|i| {
                                let f = self.factor(i, z, t);
                                self.weights[i] * self.b[i][j] * self.b[i][l] / (f * f)
                            })
                            .sum::<Complex64>()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Critical points of the master function at one parameter point, with the
/// per-point data every oracle evaluation needs.
#[derive(Debug, Clone)]
pub struct CriticalData {
    pub z: Vec<f64>,
    pub points: Vec<Vec<Complex64>>,
    pub hessian_dets: Vec<Complex64>,
    pub factor_values: Vec<Vec<Complex64>>,
    /// k = 1 only: the point list is provably complete.
    pub certified: bool,
    /// Generic-count heuristic C(n−1, k); reported, never asserted, for k ≥ 2.
    pub expected_count: Option<usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(coeffs: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// Ehrlich–Aberth simultaneous iteration; coefficients run low to high with
/// a nonzero leading term.
fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let radius = 1.0
        + coeffs[..degree].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / degree as f64 + 0.41;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    for _ in 0..300 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = poly_eval(coeffs, roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() == 0.0 { p } else { p / dp };
            let repulse: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (roots[i] - roots[j]).finv())
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            roots[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }
    Ok(roots)
}

/// Locates the critical points of the master function at `z`.
///
/// k = 1: the numerator of ∂Φ/∂t is a degree n−1 polynomial; all roots are
/// found simultaneously, Newton-polished, and checked against the
/// nondegeneracy invariants — any failure reports as near-discriminant.
/// k ≥ 2: damped Newton from a deterministic seeded grid; the achieved count
/// is reported, not asserted.
pub fn critical_points(model: &ArrangementModel, z: &[f64]) -> Result<CriticalData> {
    if z.len() != model.n {
        return Err(Error::InvalidConfiguration(format!(
            "expected a parameter point in C^{}, got length {}",
            model.n,
            z.len()
        )));
    }
    let points = if model.k == 1 {
        critical_points_line(model, z)?
    } else {
        critical_points_multistart(model, z)?
    };

    let mut data = CriticalData {
        z: z.to_vec(),
        points: Vec::new(),
        hessian_dets: Vec::new(),
        factor_values: Vec::new(),
        certified: model.k == 1,
        expected_count: if model.k == 1 { None } else { Some(binomial(model.n - 1, model.k)) },
    };
    let weight_scale: f64 = model.weights.iter().map(|w| w.norm()).sum();
    for t in points {
        let factors: Vec<Complex64> = (0..model.n).map(|i| model.factor(i, z, &t)).collect();
        let factor_scale =
            1.0 + z.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if let Some(i) = factors.iter().position(|f| f.norm() < model.tol.factor_min * factor_scale)
        {
            return Err(Error::NearDiscriminant(format!(
                "critical point sits on hyperplane {}",
                i + 1
            )));
        }
        let grad = model.gradient(z, &t);
        let grad_scale: f64 = weight_scale / factor_scale;
        let residual = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if residual > model.tol.gradient * grad_scale.max(1.0) {
            return Err(Error::NearDiscriminant(format!(
                "gradient residual {residual:.3e} above tolerance"
            )));
        }
        let hess = model.hessian(z, &t);
        let det = complex_det(&hess);
        if det.norm() < model.tol.hessian_min {
            return Err(Error::NearDiscriminant("degenerate Hessian".into()));
        }
        data.points.push(t);
        data.hessian_dets.push(det);
        data.factor_values.push(factors);
    }
    if model.k == 1 && data.points.len() != model.n - 1 {
        return Err(Error::NearDiscriminant(format!(
            "found {} critical points, expected exactly {}",
            data.points.len(),
            model.n - 1
        )));
    }
    Ok(data)
}

fn sort_points(points: &mut [Vec<Complex64>]) {
    points.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn critical_points_line(model: &ArrangementModel, z: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    // exact a-priori check: all hyperplane points −z_i/b_i distinct
    let hyperplanes: Vec<Complex64> =
        (0..model.n).map(|i| -Complex64::new(z[i], 0.0) / model.b[i][0]).collect();
    let scale = 1.0 + hyperplanes.iter().map(|h| h.norm()).fold(0.0, f64::max);
    for i in 0..model.n {
        for j in (i + 1)..model.n {
            if (hyperplanes[i] - hyperplanes[j]).norm() < model.tol.separation * scale {
                return Err(Error::NearDiscriminant(format!(
                    "hyperplanes {} and {} coincide",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    // numerator of ∂Φ/∂t: Σ_i a_i b_i Π_{j≠i} (b_j t + z_j), degree n−1
    let mut numerator = vec![Complex64::new(0.0, 0.0); model.n];
    for i in 0..model.n {
        let mut prod = vec![model.weights[i] * model.b[i][0]];
        for j in 0..model.n {
            if j != i {
                prod = poly_mul(&prod, &[Complex64::new(z[j], 0.0), model.b[j][0]]);
            }
        }
        for (c, v) in numerator.iter_mut().zip(prod) {
            *c += v;
        }
    }
    let max_coeff = numerator.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if numerator[model.n - 1].norm() < 1e-12 * max_coeff.max(1.0) {
        return Err(Error::NearDiscriminant(
            "leading coefficient vanishes (balanced weight direction)".into(),
        ));
    }
    let mut roots = aberth_roots(&numerator)?;
    // polish on the rational gradient itself
    for t in roots.iter_mut() {
        let mut point = vec![*t];
        newton_polish(model, z, &mut point, 40);
        *t = point[0];
    }
    let root_scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if (roots[i] - roots[j]).norm() < model.tol.separation * root_scale {
                return Err(Error::NearDiscriminant("critical points collide".into()));
            }
        }
    }
    let mut points: Vec<Vec<Complex64>> = roots.into_iter().map(|r| vec![r]).collect();
    sort_points(&mut points);
    Ok(points)
}

fn newton_polish(model: &ArrangementModel, z: &[f64], t: &mut Vec<Complex64>, iters: usize) {
    let grad_norm = |point: &[Complex64]| -> f64 {
        model.gradient(z, point).iter().map(|g| g.norm()).fold(0.0, f64::max)
    };
    for _ in 0..iters {
        let grad = model.gradient(z, t);
        let hess = model.hessian(z, t);
        let Some(step) = complex_solve(&hess, &grad) else {
            return;
        };
        // backtrack when a full step grows the residual
        let before = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let mut lambda = 1.0f64;
        let mut trial = t.clone();
        for _ in 0..8 {
            for j in 0..model.k {
                trial[j] = t[j] - step[j] * lambda;
            }
            if grad_norm(&trial) <= before || lambda < 1e-2 {
                break;
            }
            lambda /= 2.0;
        }
        let mut norm = 0.0f64;
        for j in 0..model.k {
            norm = norm.max((t[j] - trial[j]).norm() / (1.0 + trial[j].norm()));
            t[j] = trial[j];
        }
        if norm < 1e-15 {
            return;
        }
    }
}

fn critical_points_multistart(
    model: &ArrangementModel,
    z: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xba5e_9acc);

    // with positive real weights the critical points sit in bounded chambers,
    // so seed around the arrangement vertices (k-fold hyperplane
    // intersections) rather than an unscaled box
    let mut vertices: Vec<Vec<Complex64>> = Vec::new();
    for subset in k_subsets(model.n, model.k) {
        let rows: Vec<Vec<Complex64>> = subset.iter().map(|&i| model.b[i].clone()).collect();
        let rhs: Vec<Complex64> = subset.iter().map(|&i| Complex64::new(-z[i], 0.0)).collect();
        if let Some(v) = complex_solve(&rows, &rhs) {
            vertices.push(v);
        }
    }
    let spread = vertices
        .iter()
        .flat_map(|v| v.iter().map(|c| c.norm()))
        .fold(0.0, f64::max)
        .max(1.0);
    let expected = binomial(model.n - 1, model.k).max(1);
    let starts = (expected * 80).min(4000);
    let mut found: Vec<Vec<Complex64>> = Vec::new();
    let scale = 1.0 + spread;
    let weight_scale: f64 = model.weights.iter().map(|w| w.norm()).sum();
    for _ in 0..starts {
        let mut t = vec![Complex64::new(0.0, 0.0); model.k];
        if vertices.is_empty() {
            for c in t.iter_mut() {
                *c = Complex64::new(rng.gen_range(-spread..spread), rng.gen_range(-0.3..0.3));
            }
        } else {
            // a random convex-ish combination of up to k+1 vertices, jittered
            let picks = rng.gen_range(1..=(model.k + 1).min(vertices.len()));
            let mut weights = Vec::with_capacity(picks);
            let mut sum = 0.0;
            for _ in 0..picks {
                let w: f64 = rng.gen_range(0.05..1.0);
                weights.push(w);
                sum += w;
            }
            for w in weights.iter_mut() {
                *w /= sum;
            }
            for &w in &weights {
                let v = &vertices[rng.gen_range(0..vertices.len())];
                for (tj, vj) in t.iter_mut().zip(v) {
                    *tj += vj * w;
                }
            }
            for c in t.iter_mut() {
                *c += Complex64::new(
                    rng.gen_range(-0.2..0.2) * spread,
                    rng.gen_range(-0.05..0.05) * spread,
                );
            }
        }
        if (0..model.n).any(|i| model.factor(i, z, &t).norm() < 1e-9) {
            continue;
        }
        newton_polish(model, z, &mut t, 80);
        // the gradient also vanishes towards infinity; drop escapees and
        // degenerate candidates rather than erroring on a best-effort path
        if t.iter().any(|c| c.norm() > 1e3 * scale) {
            continue;
        }
        let grad = model.gradient(z, &t);
        let residual = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if residual > model.tol.gradient * weight_scale.max(1.0) {
            continue;
        }
        if (0..model.n).any(|i| model.factor(i, z, &t).norm() < model.tol.factor_min * scale) {
            continue;
        }
        if complex_det(&model.hessian(z, &t)).norm() < model.tol.hessian_min {
            continue;
        }
        if found
            .iter()
            .any(|p| p.iter().zip(&t).map(|(a, b)| (a - b).norm()).sum::<f64>() < 1e-7 * scale)
        {
            continue;
        }
        found.push(t);
    }
    sort_points(&mut found);
    Ok(found)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn complex_det(m: &[Vec<Complex64>]) -> Complex64 {
    let k = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let Some(p) = (col..k).max_by(|&x, &y| {
            a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap()
        }) else {
            return Complex64::new(0.0, 0.0);
        };
        if a[p][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for i in (col + 1)..k {
            let factor = a[i][col] / a[col][col];
            for c in col..k {
                let delta = factor * a[col][c];
                a[i][c] -= delta;
            }
        }
    }
    det
}

fn complex_solve(m: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let k = m.len();
    let mut a: Vec<Vec<Complex64>> = m.iter().zip(rhs).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..k {
        let p = (col..k).max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())?;
        if a[p][col].norm() < 1e-300 {
            return None;
        }
        a.swap(p, col);
        for i in 0..k {
            if i != col {
                let factor = a[i][col] / a[col][col];
                for c in col..=k {
                    let delta = factor * a[col][c];
                    a[i][c] -= delta;
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

/// The period-map values p_i = a_i / f_i at every critical point; the Higgs
/// endomorphism for coordinate i is diagonal with these entries in the
/// critical-point basis.
pub fn higgs_values(model: &ArrangementModel, crit: &CriticalData, index: u32) -> Vec<Complex64> {
    let i = (index - 1) as usize;
    crit.factor_values.iter().map(|f| model.weights[i] / f[i]).collect()
}

/// The residue pairing S(g, h) = Σ_c g(c)·h(c) / det Hess(c) over the
/// nondegenerate critical points.
pub fn residue_pairing(
    model: &ArrangementModel,
    crit: &CriticalData,
    g: &[Complex64],
    h: &[Complex64],
) -> Result<Complex64> {
    if g.len() != crit.points.len() || h.len() != crit.points.len() {
        return Err(Error::SizeMismatch { expected: crit.points.len(), got: g.len().min(h.len()) });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((gv, hv), det) in g.iter().zip(h).zip(&crit.hessian_dets) {
        if det.norm() < model.tol.hessian_min {
            return Err(Error::DegenerateHessian);
        }
        acc += gv * hv / det;
    }
    Ok(acc)
}

/// S(C_T ζ, ζ) at z: the product Π p_i^{T(i)} over each critical point,
/// paired against the unit vector.
pub fn oracle_eval_s(model: &ArrangementModel, system: &System, z: &[f64]) -> Result<Complex64> {
    let crit = critical_points(model, z)?;
    let values = product_values(model, &crit, system)?;
    let ones = vec![Complex64::new(1.0, 0.0); crit.points.len()];
    residue_pairing(model, &crit, &values, &ones)
}

fn product_values(
    model: &ArrangementModel,
    crit: &CriticalData,
    system: &System,
) -> Result<Vec<Complex64>> {
    for i in system.support() {
        if i == 0 || i as usize > model.n {
            return Err(Error::InvalidConfiguration(format!("index {i} outside 1..={}", model.n)));
        }
    }
    let mut values = vec![Complex64::new(1.0, 0.0); crit.points.len()];
    for (i, count) in system.iter() {
        let p = higgs_values(model, crit, i);
        for (v, pv) in values.iter_mut().zip(p) {
            *v *= pv.powu(count);
        }
    }
    Ok(values)
}

/// (∂_{T₁} S(C_{T₂} ζ, ζ))(x) by nested central differences with one
/// Richardson extrapolation level per differentiation order. Steps scale
/// with the magnitude of the coordinate being varied.
pub fn oracle_deriv_s(
    model: &ArrangementModel,
    t1: &System,
    t2: &System,
    x: &[f64],
) -> Result<Complex64> {
    if t1.size() > model.max_fd_order {
        return Err(Error::UnsupportedParameter(format!(
            "finite differences support derivative order up to {}, got {}",
            model.max_fd_order,
            t1.size()
        )));
    }
    let coords: Vec<usize> = t1
        .expand_slots()
        .iter()
        .map(|s| (s.index - 1) as usize)
        .collect();
    fd_recursive(model, &coords, t2, x)
}

fn fd_recursive(
    model: &ArrangementModel,
    coords: &[usize],
    t2: &System,
    x: &[f64],
) -> Result<Complex64> {
    let Some((&i, rest)) = coords.split_first() else {
        return oracle_eval_s(model, t2, x);
    };
    let h = model.fd_step * x[i].abs().max(1.0);
    let central = |step: f64| -> Result<Complex64> {
        let mut plus = x.to_vec();
        plus[i] += step;
        let mut minus = x.to_vec();
        minus[i] -= step;
        Ok((fd_recursive(model, rest, t2, &plus)? - fd_recursive(model, rest, t2, &minus)?)
            / Complex64::new(2.0 * step, 0.0))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Max deviation of S(C_{I₁}ζ, C_{I₂}ζ) from its value at the first sample;
/// flat sections and a flat pairing make this z-independent.
pub fn check_flatness(
    model: &ArrangementModel,
    i1: &[u32],
    i2: &[u32],
    z_samples: &[Vec<f64>],
) -> Result<f64> {
    for set in [i1, i2] {
        if set.len() != model.k {
            return Err(Error::SizeMismatch { expected: model.k, got: set.len() });
        }
        let rows: Vec<Vec<Complex64>> =
            set.iter().map(|&i| model.b[(i - 1) as usize].clone()).collect();
        if complex_rank(&rows, model.k) != model.k {
            return Err(Error::InvalidConfiguration(format!("{set:?} is not independent")));
        }
    }
    let mut total = System::empty();
    for &i in i1.iter().chain(i2) {
        total.add(i, 1);
    }
    let mut reference = None;
    let mut deviation = 0.0f64;
    for z in z_samples {
        let value = oracle_eval_s(model, &total, z)?;
        match reference {
            None => reference = Some(value),
            Some(r) => deviation = deviation.max((value - r).norm()),
        }
    }
    Ok(deviation)
}

/// The kernel identity residual max_j |Σ_i b_i^j p_i| over all critical
/// points; the Higgs field vanishes along the coefficient directions.
pub fn kernel_residual(model: &ArrangementModel, crit: &CriticalData) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..crit.points.len() {
        for j in 0..model.k {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..model.n {
                acc += model.b[i][j] * model.weights[i] / crit.factor_values[c][i];
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Adapter exposing the arrangement as a structure oracle of order (n, k, 2).
/// Flat values are evaluated at the model basepoint.
#[derive(Debug, Clone)]
pub struct ArrangementOracle {
    model: ArrangementModel,
}

impl ArrangementOracle {
    pub fn new(model: ArrangementModel) -> ArrangementOracle {
        ArrangementOracle { model }
    }

    pub fn model(&self) -> &ArrangementModel {
        &self.model
    }
}

impl StructureOracle for ArrangementOracle {
    fn order(&self) -> (usize, usize, usize) {
        (self.model.n, self.model.k, 2)
    }

    fn s_flat(&self, system: &System) -> Result<Complex64> {
        oracle_eval_s(&self.model, system, &self.model.basepoint)
    }

    fn eval_s(&self, system: &System, z: &[f64]) -> Result<Complex64> {
        oracle_eval_s(&self.model, system, z)
    }

    fn deriv_s(&self, t1: &System, t2: &System, x: &[f64]) -> Result<Complex64> {
        oracle_deriv_s(&self.model, t1, t2, x)
    }

    fn derivative_tolerance(&self) -> f64 {
        1e-6
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_line_model(a: [f64; 2]) -> ArrangementModel {
        ArrangementModel::from_real(vec![vec![1.0], vec![1.0]], a.to_vec(), vec![0.0, 2.0])
            .unwrap()
    }

    #[test]
    fn single_critical_point_closed_form() {
        let model = two_line_model([1.0, 1.0]);
        let crit = critical_points(&model, &[0.0, 2.0]).unwrap();
        assert_eq!(crit.points.len(), 1);
        assert!(crit.certified);
        assert_abs_diff_eq!(crit.points[0][0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(crit.factor_values[0][0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(crit.factor_values[0][1].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(crit.hessian_dets[0].re, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn coincident_hyperplanes_are_rejected() {
        let model = two_line_model([1.0, 1.0]);
        assert!(matches!(
            critical_points(&model, &[0.0, 0.0]),
            Err(Error::NearDiscriminant(_))
        ));
    }

    #[test]
    fn three_lines_have_two_critical_points() {
        let model = ArrangementModel::from_real(
            vec![vec![1.0], vec![1.0], vec![1.0]],
            vec![1.0, 2.0, 0.5],
            vec![0.0, 1.0, 3.0],
        )
        .unwrap();
        let crit = critical_points(&model, &[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(crit.points.len(), 2);
    }

    #[test]
    fn higgs_values_and_kernel_identity() {
        let model = two_line_model([1.0, 1.0]);
        let crit = critical_points(&model, &[0.0, 2.0]).unwrap();
        let p1 = higgs_values(&model, &crit, 1);
        let p2 = higgs_values(&model, &crit, 2);
        assert_abs_diff_eq!(p1[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p2[0].re, 1.0, epsilon = 1e-12);
        assert!(kernel_residual(&model, &crit) < 1e-10);
    }

    #[test]
    fn residue_pairing_matches_closed_form() {
        // S(p₁, p₁) = −a₁a₂/(a₁+a₂), independent of z
        let model = two_line_model([1.0, 1.0]);
        let crit = critical_points(&model, &[0.0, 2.0]).unwrap();
        let p1 = higgs_values(&model, &crit, 1);
        let s = residue_pairing(&model, &crit, &p1, &p1).unwrap();
        assert_abs_diff_eq!(s.re, -0.5, epsilon = 1e-12);

        let ones = vec![Complex64::new(1.0, 0.0); 1];
        let s_unit = residue_pairing(&model, &crit, &ones, &ones).unwrap();
        assert_abs_diff_eq!(s_unit.re, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn pairing_is_symmetric_on_random_values() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let model = ArrangementModel::from_real(
            vec![vec![1.0], vec![2.0], vec![-1.0]],
            vec![1.0, 0.7, 2.2],
            vec![0.3, 1.0, 2.5],
        )
        .unwrap();
        let crit = critical_points(&model, &[0.3, 1.0, 2.5]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let g: Vec<Complex64> = (0..crit.points.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let h: Vec<Complex64> = (0..crit.points.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let gh = residue_pairing(&model, &crit, &g, &h).unwrap();
            let hg = residue_pairing(&model, &crit, &h, &g).unwrap();
            assert!((gh - hg).norm() < 1e-14);
        }
    }

    #[test]
    fn eval_examples() {
        let model = two_line_model([1.0, 1.0]);
        let s = oracle_eval_s(&model, &System::of(&[(1, 2)]), &[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(s.re, -0.5, epsilon = 1e-12);
        let s = oracle_eval_s(&model, &System::of(&[(1, 1), (2, 1)]), &[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(s.re, 0.5, epsilon = 1e-12);
        let s = oracle_eval_s(&model, &System::of(&[(1, 3)]), &[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(s.re, 0.5, epsilon = 1e-12);
        // z-independence of the flat value
        let s2 = oracle_eval_s(&model, &System::of(&[(1, 2)]), &[1.3, -0.4]).unwrap();
        assert_abs_diff_eq!(s2.re, -0.5, epsilon = 1e-10);
    }

    #[test]
    fn closed_form_anchor_randomized() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a1 = rng.gen_range(0.2..3.0);
            let a2 = rng.gen_range(0.2..3.0);
            let z1 = rng.gen_range(-2.0..2.0);
            let mut z2 = rng.gen_range(-2.0..2.0);
            if (z1 - z2 as f64).abs() < 0.3 {
                z2 += 1.0;
            }
            let model = ArrangementModel::from_real(
                vec![vec![1.0], vec![1.0]],
                vec![a1, a2],
                vec![z1, z2],
            )
            .unwrap();
            let s = oracle_eval_s(&model, &System::of(&[(1, 2)]), &[z1, z2]).unwrap();
            let expected = -a1 * a2 / (a1 + a2);
            assert!((s.re - expected).abs() < 1e-9, "{} vs {expected}", s.re);
            assert!(s.im.abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_examples() {
        // d/dz₁ S(C_{[1]+2[2]}ζ, ζ) = a₁a₂/(z₁−z₂)², evaluated at (0, 2)
        let model = two_line_model([1.0, 1.0]);
        let x = [0.0, 2.0];
        let d = oracle_deriv_s(&model, &System::singleton(1), &System::of(&[(1, 1), (2, 2)]), &x)
            .unwrap();
        assert_abs_diff_eq!(d.re, 0.25, epsilon = 1e-8);
        let d = oracle_deriv_s(&model, &System::singleton(2), &System::of(&[(1, 2), (2, 1)]), &x)
            .unwrap();
        assert_abs_diff_eq!(d.re, 0.25, epsilon = 1e-8);
        // zeroth derivative falls back to evaluation
        let d = oracle_deriv_s(&model, &System::empty(), &System::of(&[(1, 3)]), &x).unwrap();
        assert_abs_diff_eq!(d.re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn flatness_deviation_is_tiny() {
        let model = two_line_model([1.0, 1.0]);
        let samples: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![0.1 * i as f64, 2.0 + 0.3 * i as f64])
            .collect();
        let dev = check_flatness(&model, &[1], &[1], &samples).unwrap();
        assert!(dev < 1e-9, "deviation {dev}");
        let dev = check_flatness(&model, &[1], &[2], &samples).unwrap();
        assert!(dev < 1e-9, "deviation {dev}");
    }

    #[test]
    fn experimental_two_dimensional_search_reports_counts() {
        // generic 2-plane arrangement with three hyperplanes: C(2,2) = 1
        let model = ArrangementModel::from_real(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        let crit = critical_points(&model, &[1.0, 1.0, 1.0]).unwrap();
        assert!(!crit.certified);
        assert_eq!(crit.expected_count, Some(1));
        assert_eq!(crit.points.len(), 1);
        assert!(kernel_residual(&model, &crit) < 1e-9);
    }
}
