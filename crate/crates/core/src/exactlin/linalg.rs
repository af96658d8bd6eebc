//! Deterministic exact linear algebra over the scalar field.
//!
//! Everything here pivots in fixed column order, choosing the smallest row
//! index with a nonzero entry, so ranks, echelon forms and coordinates are
//! reproducible across runs and platforms.

use crate::error::{Error, Result};
use crate::exactlin::scalar::{FieldTag, Scalar};

/// A point of V ≅ 𝔽^k.
pub type VectorF = Vec<Scalar>;

fn check_lengths(rows: &[VectorF]) -> Result<usize> {
    let k = rows.first().map(|r| r.len()).unwrap_or(0);
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: r.len() });
        }
    }
    Ok(k)
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[VectorF]) -> Result<(Vec<VectorF>, Vec<usize>)> {
    let k = check_lengths(rows)?;
    let mut m: Vec<VectorF> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..k {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].inverse().expect("pivot entry is nonzero");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for c in 0..k {
                    let delta = &factor * &m[r][c];
                    m[i][c] = &m[i][c] - &delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Ok((m, pivots))
}

/// Dimension of the span of the given rows.
pub fn rank(rows: &[VectorF]) -> Result<usize> {
    Ok(rref(rows)?.0.len())
}

/// A subspace U ⊂ 𝔽^k held as a reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceRep {
    pub ambient: usize,
    pub dim: usize,
    pub rref_basis: Vec<VectorF>,
    pub pivot_columns: Vec<usize>,
}

impl SubspaceRep {
    /// The zero subspace of 𝔽^k.
    pub fn zero(ambient: usize) -> SubspaceRep {
        SubspaceRep { ambient, dim: 0, rref_basis: Vec::new(), pivot_columns: Vec::new() }
    }

    /// Span of the given vectors.
    pub fn from_spanning(rows: &[VectorF], ambient: usize) -> Result<SubspaceRep> {
        for r in rows {
            if r.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: r.len() });
            }
        }
        let (basis, pivot_columns) = rref(rows)?;
        Ok(SubspaceRep { ambient, dim: basis.len(), rref_basis: basis, pivot_columns })
    }

    /// Reduces `v` modulo the subspace: subtracts the unique combination of
    /// echelon rows matching `v` on the pivot columns. The result is zero
    /// exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &VectorF) -> VectorF {
        let mut w = v.clone();
        for (row, &p) in self.rref_basis.iter().zip(&self.pivot_columns) {
            if !w[p].is_zero() {
                let factor = w[p].clone();
                for c in 0..self.ambient {
                    let delta = &factor * &row[c];
                    w[c] = &w[c] - &delta;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &VectorF) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Whether every basis vector of `other` lies in `self`.
    pub fn contains_subspace(&self, other: &SubspaceRep) -> bool {
        other.rref_basis.iter().all(|v| self.contains(v))
    }

    pub fn is_full(&self) -> bool {
        self.dim == self.ambient
    }
}

/// Coordinates of `v` in a full basis of 𝔽^k: the unique λ with
/// v = Σ λ(c)·basis[c].
pub fn coords_in_basis(field: &FieldTag, v: &VectorF, basis: &[VectorF]) -> Result<Vec<Scalar>> {
    let k = check_lengths(basis)?;
    if basis.len() != k || v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: v.len().max(basis.len()) });
    }
    coords_in_spanning(field, v, basis)?.ok_or(Error::SingularBasis)
}

/// Coordinates of `v` in an independent family (the members act as columns
/// of the solve). Returns `None` when `v` is outside the span; errors when
/// the family is dependent.
pub fn coords_in_spanning(
    field: &FieldTag,
    v: &VectorF,
    family: &[VectorF],
) -> Result<Option<Vec<Scalar>>> {
    let d = family.len();
    if d == 0 {
        // the empty family spans {0}
        return Ok(if v.iter().all(Scalar::is_zero) { Some(Vec::new()) } else { None });
    }
    let k = check_lengths(family)?;
    if v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: v.len() });
    }
    // Augmented system: k rows, d+1 columns (family members as columns | v).
    let mut aug: Vec<VectorF> = (0..k)
        .map(|row| {
            let mut line: VectorF = family.iter().map(|f| f[row].clone()).collect();
            line.push(v[row].clone());
            line
        })
        .collect();
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..d {
        let Some(p) = (r..k).find(|&i| !aug[i][col].is_zero()) else {
            return Err(Error::SingularBasis);
        };
        aug.swap(r, p);
        let inv = aug[r][col].inverse().expect("pivot entry is nonzero");
        for x in aug[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..k {
            if i != r && !aug[i][col].is_zero() {
                let factor = aug[i][col].clone();
                for c in 0..=d {
                    let delta = &factor * &aug[r][c];
                    aug[i][c] = &aug[i][c] - &delta;
                }
            }
        }
        pivot_rows.push((r, col));
        r += 1;
    }
    // Consistency: rows below the pivots must have zero right-hand side.
    for row in aug.iter().skip(r) {
        if !row[d].is_zero() {
            return Ok(None);
        }
    }
    let mut coords = vec![field.zero(); d];
    for (row, col) in pivot_rows {
        coords[col] = aug[row][d].clone();
    }
    Ok(Some(coords))
}

/// Greedy smallest-position-first maximal independent subset; its span equals
/// the span of the input. Positions are 0-based.
pub fn extract_spanning_subset(rows: &[VectorF]) -> Result<Vec<usize>> {
    let k = check_lengths(rows)?;
    let mut acc = IndependentAccumulator::new(k);
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if acc.try_add(row) {
            chosen.push(i);
        }
    }
    Ok(chosen)
}

/// Deterministic coordinates of v + U in the complement of U spanned by the
/// non-pivot standard coordinates of U's echelon form. Linear in v with
/// kernel exactly U.
pub fn quotient_coords(v: &VectorF, subspace: &SubspaceRep) -> Vec<Scalar> {
    let reduced = subspace.reduce(v);
    (0..subspace.ambient)
        .filter(|c| !subspace.pivot_columns.contains(c))
        .map(|c| reduced[c].clone())
        .collect()
}

/// Incrementally grows an independent family, for greedy basis extraction.
pub struct IndependentAccumulator {
    ambient: usize,
    rows: Vec<VectorF>,
    pivots: Vec<usize>,
}

impl IndependentAccumulator {
    pub fn new(ambient: usize) -> Self {
        IndependentAccumulator { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it enlarges the span; returns whether it did.
    pub fn try_add(&mut self, v: &VectorF) -> bool {
        let mut w = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let factor = w[p].clone();
                for c in 0..self.ambient {
                    let delta = &factor * &row[c];
                    w[c] = &w[c] - &delta;
                }
            }
        }
        let Some(p) = (0..self.ambient).find(|&c| !w[c].is_zero()) else {
            return false;
        };
        let inv = w[p].inverse().expect("entry is nonzero");
        for x in w.iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldTag {
        FieldTag::Rationals
    }

    fn vq(entries: &[i64]) -> VectorF {
        entries.iter().map(|&e| q().from_i64(e)).collect()
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&[vq(&[1, 0]), vq(&[0, 1]), vq(&[1, 1])]).unwrap(), 2);
        assert_eq!(rank(&[vq(&[0, 0]), vq(&[0, 0])]).unwrap(), 0);
        assert!(rank(&[vq(&[1, 0]), vq(&[1])]).is_err());
    }

    #[test]
    fn coords_reconstruct_exactly() {
        // e1 = -v2 + v3 in the basis ((0,1),(1,1))
        let basis = vec![vq(&[0, 1]), vq(&[1, 1])];
        let c = coords_in_basis(&q(), &vq(&[1, 0]), &basis).unwrap();
        assert_eq!(c, vec![q().from_i64(-1), q().from_i64(1)]);
        let c = coords_in_basis(&q(), &basis[0], &basis).unwrap();
        assert_eq!(c, vec![q().one(), q().zero()]);
        assert!(matches!(
            coords_in_basis(&q(), &vq(&[1, 0]), &[vq(&[1, 0]), vq(&[2, 0])]),
            Err(Error::SingularBasis)
        ));
    }

    #[test]
    fn spanning_subset_greedy_order() {
        let rows = vec![vq(&[1, 0]), vq(&[1, 0]), vq(&[0, 1])];
        assert_eq!(extract_spanning_subset(&rows).unwrap(), vec![0, 2]);
        let zeros = vec![vq(&[0, 0]), vq(&[0, 0])];
        assert!(extract_spanning_subset(&zeros).unwrap().is_empty());
    }

    #[test]
    fn quotient_coordinates() {
        let u = SubspaceRep::from_spanning(&[vq(&[1, 0])], 2).unwrap();
        assert_eq!(quotient_coords(&vq(&[3, 5]), &u), vec![q().from_i64(5)]);
        assert_eq!(quotient_coords(&vq(&[7, 0]), &u), vec![q().zero()]);
        let trivial = SubspaceRep::zero(2);
        assert_eq!(quotient_coords(&vq(&[3, 5]), &trivial), vq(&[3, 5]));
    }

    #[test]
    fn subspace_membership() {
        let u = SubspaceRep::from_spanning(&[vq(&[1, 1, 0]), vq(&[0, 0, 1])], 3).unwrap();
        assert!(u.contains(&vq(&[2, 2, 5])));
        assert!(!u.contains(&vq(&[1, 0, 0])));
        assert_eq!(u.dim, 2);
    }

    #[test]
    fn rank_agrees_with_minor_expansion_over_f2() {
        // exhaustive 3x3 matrices over F2 against the independent minor oracle
        let f2 = FieldTag::new_prime(2).unwrap();
        for mask in 0u32..512 {
            let rows: Vec<VectorF> = (0..3)
                .map(|r| (0..3).map(|c| f2.from_i64(((mask >> (3 * r + c)) & 1) as i64)).collect())
                .collect();
            let fast = rank(&rows).unwrap();
            let slow = crate::bruteforce::minor_rank(&rows).unwrap();
            assert_eq!(fast, slow, "mask {mask}");
        }
    }

    proptest! {
        #[test]
        fn rank_invariant_under_scaling_and_permutation(
            entries in prop::collection::vec(-3i64..=3, 9),
            scales in prop::collection::vec(1i64..=4, 3),
            swap in 0usize..3,
        ) {
            let rows: Vec<VectorF> = entries.chunks(3).map(|ch| ch.iter().map(|&e| q().from_i64(e)).collect()).collect();
            let base = rank(&rows).unwrap();
            let mut scaled: Vec<VectorF> = rows
                .iter()
                .zip(&scales)
                .map(|(row, &s)| row.iter().map(|x| x * &q().from_i64(s)).collect())
                .collect();
            prop_assert_eq!(rank(&scaled).unwrap(), base);
            scaled.swap(0, swap);
            prop_assert_eq!(rank(&scaled).unwrap(), base);
        }

        #[test]
        fn quotient_is_linear(
            a in prop::collection::vec(-4i64..=4, 3),
            b in prop::collection::vec(-4i64..=4, 3),
            u in prop::collection::vec(-2i64..=2, 3),
        ) {
            let span: Vec<VectorF> = vec![u.iter().map(|&e| q().from_i64(e)).collect()];
            let sub = SubspaceRep::from_spanning(&span, 3).unwrap();
            let va: VectorF = a.iter().map(|&e| q().from_i64(e)).collect();
            let vb: VectorF = b.iter().map(|&e| q().from_i64(e)).collect();
            let sum: VectorF = va.iter().zip(&vb).map(|(x, y)| x + y).collect();
            let qa = quotient_coords(&va, &sub);
            let qb = quotient_coords(&vb, &sub);
            let qsum = quotient_coords(&sum, &sub);
            let pointwise: VectorF = qa.iter().zip(&qb).map(|(x, y)| x + y).collect();
            prop_assert_eq!(qsum, pointwise);
        }

        #[test]
        fn coords_substitute_back(
            ventries in prop::collection::vec(-5i64..=5, 3),
            bentries in prop::collection::vec(-3i64..=3, 9),
        ) {
            let basis: Vec<VectorF> = bentries.chunks(3).map(|ch| ch.iter().map(|&e| q().from_i64(e)).collect()).collect();
            prop_assume!(rank(&basis).unwrap() == 3);
            let v: VectorF = ventries.iter().map(|&e| q().from_i64(e)).collect();
            let lambda = coords_in_basis(&q(), &v, &basis).unwrap();
            let mut rebuilt = vec![q().zero(); 3];
            for (l, bvec) in lambda.iter().zip(&basis) {
                for c in 0..3 {
                    rebuilt[c] = &rebuilt[c] + &(l * &bvec[c]);
                }
            }
            prop_assert_eq!(rebuilt, v);
        }
    }
}
