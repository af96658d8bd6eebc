//! Exact machinery for packing finite vector systems into m disjoint bases
//! (with violating-subspace certificates), walking between good
//! decompositions through verifiable local moves, and assembling the
//! potentials of an arrangement-backed structure oracle.

pub mod arrangement;
pub mod bruteforce;
pub mod corpus;
pub mod equivalence;
pub mod error;
pub mod exactlin;
pub mod packing;
pub mod potential;
pub mod systems;

pub use error::{Error, Result};
pub use exactlin::{FieldTag, Scalar, SubspaceRep, VectorF};
pub use num_complex::Complex64;
pub use packing::{Qualification, SplitOutcome, ViolationCertificate};
pub use systems::{Configuration, Decomposition, Slot, SlotList, System};

pub use arrangement::{ArrangementModel, ArrangementOracle, CriticalData};
pub use equivalence::{GoodDecomposition, GoodOutcome, LocalRelationWitness, WalkChain};
pub use potential::{MultiIndexPolynomial, StructureOracle};
