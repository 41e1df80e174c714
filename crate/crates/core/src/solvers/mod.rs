//! Self-contained numerical kernels.
//!
//! Tolerance ladder used across the crate: LP feasibility `1e-9`, duality gap
//! `1e-8`, reported-value comparisons `1e-7`.

pub mod cutting;
pub mod lp;
pub mod scalar;

pub use cutting::{maximize_concave, maximize_concave_simplex, ConcaveMax, ConcaveOutcome, Domain, HalfSpace, Oracle, DEFAULT_MAX_ITER};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense, SolveResult};
pub use scalar::{bisect_root, minimize_convex_1d};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const DUALITY_TOL: f64 = 1e-8;
pub const VALUE_TOL: f64 = 1e-7;
