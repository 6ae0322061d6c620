//! Combinatorics of nodal curves: dual graphs, twister lattices, degree class
//! groups, balanced multidegrees and the stratification of compactified
//! Néron models.
//!
//! The library works at "desk scale": all arithmetic is exact (arbitrary
//! precision integers in the lattice layer, exact rationals for the basic
//! inequality), every enumeration is deterministic, and outputs are emitted
//! in a canonical order so that identical inputs produce identical results.

pub mod error;
pub mod format;
pub mod graph;
pub mod lattice;
pub mod picard;
pub mod strata;

pub use error::Error;
pub use graph::{BlowUpContext, CurveClass, DualGraph, Subcurve, SubcurveStats};
pub use lattice::{FiniteAbelianGroup, IntegerMatrix, Lattice, SmithNormalForm};
pub use picard::{
    BalanceLevel, BalancedReport, BlowUpClasses, DegreeClassGroup, Multidegree, RhoPair, RhoTable,
    TwisterLattice,
};
pub use strata::{Stratification, Stratum};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
