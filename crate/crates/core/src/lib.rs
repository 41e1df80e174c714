//! Pricing bounds for contingent claims in markets whose set of 0-attainable
//! claims is convex but not necessarily a cone.
//!
//! Everything lives on a finite sample space, so claims and probability
//! measures are plain vectors. The crate is `no_std` (it needs `alloc`) and
//! carries its own numerical kernels: a dense simplex LP solver, golden-section
//! search, bisection and a cutting-plane maximizer over the probability simplex.
//!
//! Layout:
//! - [`space`]: sample spaces, claims, densities, Young functions, Luxemburg norm.
//! - [`market`]: the convex set `M` of attainable claims and its support function.
//! - [`solvers`]: the numerical kernels.
//! - [`risk`]: superhedging cost, its dual minorant and the other valuations.
//! - [`diagnostics`]: checkers for the existence, verification and FTAP results.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod error;
pub mod market;
pub mod report;
pub mod risk;
pub mod solvers;
pub mod space;
pub mod value;

mod math;

pub use error::{Error, Result};
pub use market::{conical_hull, extended_market, AttainableSet, ConicalMarket, ExtendedMarket, Friction, MarketBody, MarketModel};
pub use report::{DiagnosticReport, Verdict, Witness};
pub use risk::RiskMeasure;
pub use space::{Claim, Density, SampleSpace, YoungFunction};
pub use value::Extended;
