//! Dissipation distance and optimal shear factorizations on SL(2).
//!
//! A 2D single crystal with two symmetric slip systems dissipates energy
//! proportionally to the total shear. The induced distance on SL(2) is the
//! factorization cost
//!
//! ```text
//! T(g) = inf { sum |t_i| : g = exp(t_1 A_1) ... exp(t_k A_k), A_i in {P, Q} }
//! ```
//!
//! where `P`, `Q` generate the shears along the coordinate axes. This crate
//! computes `T(g)` and an optimal factorization in closed form by inverting a
//! finite sufficient family of factorization maps, quotients the result to
//! PSL(2) (equivalently: shortest paths of a forward/backward car with bounded
//! turning radius in the hyperbolic plane), reduces arbitrary two-slip systems
//! to the canonical one, meshes metric spheres `{ T = c }` in coordinates of
//! the simply connected cover, and renders optimal trajectories in the
//! Poincare disc.
//!
//! Entry points:
//! - [`solver::distance_sl2`], [`solver::distance_psl2`],
//!   [`solver::distance_two_slip`] — distances and optimal factorizations;
//! - [`fammaps::MapDescriptor`] — the factorization-map families, forward and
//!   inverse;
//! - [`spheres::build_sphere`] — metric-sphere patch meshes;
//! - [`paths::plan_rscp`] — hyperbolic Reeds-Shepp car paths in the disc;
//! - [`oracle`] — brute-force verification of optimality and identities.
//!
//! Everything is a pure function over immutable values; all types are `Copy`
//! or cheaply cloned and safe to share across threads.

pub use num_complex;

pub mod algebra;
pub mod cover;
pub mod fammaps;
pub mod oracle;
pub mod paths;
pub mod solver;
pub mod spheres;
pub mod symmetry;

pub use algebra::{AlgebraElement, Covector, GroupElement};
pub use cover::CoverElement;
pub use fammaps::{Control, Factorization, Family, MapDescriptor, MapName};
pub use solver::{DistanceResult, Group, SlipPair};
pub use symmetry::SymmetryOp;

/// Unimodularity tolerance checked when constructing a [`GroupElement`]
/// from raw entries.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Divisors below this threshold trigger the degenerate branches of the
/// closed-form map inversions.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not unimodular: |det - 1| = {excess:.3e} exceeds 1e-9")]
    NonUnimodular { excess: f64 },
    #[error("degenerate pivot: division by {value:.3e}")]
    DegeneratePivot { value: f64 },
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("degenerate slip pair: {reason}")]
    DegenerateSlip { reason: &'static str },
    #[error("evaluation at a pole of the rational function (s = {value})")]
    PoleOfRational { value: f64 },
    #[error("sphere cost must be positive, got {value}")]
    InvalidCost { value: f64 },
    #[error("unknown factorization map `{name}`")]
    UnknownMap { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
