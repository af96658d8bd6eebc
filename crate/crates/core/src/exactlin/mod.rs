//! Exact field arithmetic and the deterministic linear-algebra primitives the
//! combinatorial core rests on. No floating point enters this module.

mod linalg;
mod scalar;

pub use linalg::{
    coords_in_basis, coords_in_spanning, extract_spanning_subset, quotient_coords, rank, rref,
    IndependentAccumulator, SubspaceRep, VectorF,
};
pub use scalar::{FieldTag, Scalar};
