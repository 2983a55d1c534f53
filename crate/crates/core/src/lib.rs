//! Numerical toolkit for the second-order distributional boundary value problem
//!
//! ```text
//!     -D²x = f(t, x) + g(t, x) Du,   t ∈ [0, 1],
//!     x(0) = β Dx(0),   Dx(1) + Dx(η) = 0,
//! ```
//!
//! where `u` is a regulated function (bounded variation, or merely continuous
//! like the Weierstrass function) and `Du` is its distributional derivative.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`regulated`]: regulated functions on `[0, 1]` with one-sided limits,
//!   jump registries, sup norms and total variation.
//! - [`integrate`]: Kurzweil–Henstock integrals (including improper limits of
//!   wildly oscillating integrands) and Kurzweil–Henstock–Stieltjes integrals
//!   against integrators with jumps.
//! - [`operator`]: the integral operator whose fixed points are the solutions,
//!   together with the reconstruction of `Dx` from the integral identity.
//! - [`solver`]: hypothesis checks, the a priori radius, damped Picard
//!   iteration and a posteriori verification.
//! - [`catalog`]: the named function whitelist used by problem files and the
//!   two reference problems (Heaviside-driven and Weierstrass-driven).

pub mod catalog;
pub mod error;
pub mod integrate;
pub mod operator;
pub mod regulated;
pub mod solver;

pub use error::{CatalogError, IntegrateError, ProblemError, RegulatedError, SolveError};
pub use integrate::{
    hk_integrate, hks_integrate, iterated_integrate, Integrand, IntegralResult, Method,
    TaggedPartition,
};
pub use operator::{
    apply_t, profile_f, profile_g, reconstruct_dx, BoundData, Coupling, Forcing, Interpolation,
    Operator, ProblemSpec, SolutionProfile,
};
pub use regulated::{
    weierstrass, BVData, Breakpoint, Grid, NormBounds, Profile, RegulatedFn, StepFn,
};
pub use solver::{
    check_hypotheses, radius, solve, verify, HypothesisReport, SolveOptions, SolveResult,
    Verification,
};
