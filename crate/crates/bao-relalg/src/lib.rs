//! Finite relation algebras presented by forbidden triples, with the Maddux
//! and red/green generators, basic matrices, and cylindric-basis checking.
//!
//! Consistency is kept as the complement of a forbidden-triple set that is
//! closed under the six Peircean transforms, so `consistent(a, b, c)`
//! (meaning `c <= a;b`) can be tested in any orientation of a triangle.

mod basis;
mod forbidden;
mod generators;
mod matrix;

pub use basis::{is_cylindric_basis, AmalgamFailure, BasisReport};
pub use forbidden::{peircean_closed, peircean_transforms, ra_from_forbidden, ClosureReport};
pub use generators::{maddux, redgreen};
pub use matrix::{mat_n, BasicMatrix, MatN};
