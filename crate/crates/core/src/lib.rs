//! Transversals in blow-up graphs.
//!
//! Given a connected pattern graph `H` and a required density for every edge,
//! this crate decides (for trees exactly, for general graphs by sufficient and
//! necessary certificates) whether every weighted blow-up of `H` meeting the
//! densities contains `H` as a transversal, computes critical densities and
//! bounds, and builds transversal-free weighted blow-ups that witness the
//! negative answers.
//!
//! All decision-relevant arithmetic is exact over the rationals.

pub mod acceptance;
pub mod blowup;
pub mod bounds;
pub mod catalog;
pub mod error;
pub mod graph;
pub mod number;
pub mod oracle;
pub mod polynomials;
pub mod star;
pub mod tree_decision;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeDensityAssignment, PatternGraph, ProperLabeling};
pub use number::Rational;
