//! Exact computations with matrix groups over ℤ/mℤ.
//!
//! The crate computes, from first principles, the finite-group data behind
//! torsion-degree tables for elliptic curves: subgroup censuses of GL₂-type
//! ambients up to conjugacy, orbit degree sets of distinguished subgroup
//! families, lifts of mod-p groups to mod-p² level, and the resulting
//! prime-membership tables R_Q(d) with their density constants.
//!
//! Layering, bottom up:
//! - [`residue`]: matrices/vectors over ℤ/mℤ with the modulus carried per value;
//! - [`group`]: closures, orbits, stabilizers, cores, quotient typing;
//! - [`isotype`]: identification of small abstract groups (Cn, Dn, Q8, A4, S4, …);
//! - [`census`]: subgroups of a solvable ambient up to conjugacy;
//! - [`lifts`]: subgroups of GL₂(ℤ/p²ℤ) over a fixed mod-p image, two routes;
//! - [`catalog`]: the named group families (Cartans, Borels, …) and the
//!   possible mod-p image lists for curves with and without CM;
//! - [`degrees`]: orbit degree sets and per-prime degree reports;
//! - [`rqd`]: membership tables for torsion growth in degree-d fields;
//! - [`checks`]: self-contained reproductions of the delegated computations,
//!   each returning a pass/fail verdict with machine-readable evidence.

pub mod catalog;
pub mod census;
pub mod checks;
pub mod degrees;
pub mod error;
pub mod group;
pub mod isotype;
pub mod labels;
pub mod lifts;
pub mod rqd;

mod residue;

pub use error::AlgebraError;
pub use residue::{vectors_of_order, Mat2, Residue, Vec2};
