//! Core substrate for finite Boolean algebras with operators.
//!
//! The central object is an *atom structure*: a set of atoms together with
//! accessibility relations, one per extra-Boolean operator of a chosen
//! signature.  An operator of rank `r` is encoded by an `(r+1)`-ary relation
//! `R(a0, a1, .., ar)` read as "`a0` lies below the operator applied to the
//! atoms `a1 .. ar`".  The complex algebra over an atom structure has the
//! powerset of the atoms as carrier, Boolean operations computed set-wise,
//! and each operator lifted pointwise through its relation:
//!
//! `f(X1, .., Xr) = { a : R(a, b1, .., br) for some b1 in X1, .., br in Xr }`.
//!
//! Everything here is exact and finite; nothing samples unless a checker is
//! explicitly put into sampled mode because a carrier is too large to sweep.

pub mod algebra;
pub mod axioms;
pub mod bitset;
pub mod cartesian;
pub mod error;
pub mod json;
pub mod signature;
pub mod structure;

pub use algebra::{
    dimension_set, neat_reduct, reconstruct_atom_structure, reduct, same_tables, AlgebraView,
    CmAlgebra, SubAlgebra,
};
pub use axioms::{check_ca_axioms, check_ra_laws, AxiomReport, CheckOptions, Violation};
pub use bitset::BitSet;
pub use cartesian::cartesian_atom_structure;
pub use error::Error;
pub use signature::{Kind, Signature};
pub use structure::{AtomId, FiniteAtomStructure, RaTables};

/// Result alias used across the workspace.
pub type Result<T> = std::result::Result<T, Error>;
