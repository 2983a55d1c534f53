use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegulatedError {
    #[error("t = {t} lies outside {domain}")]
    Domain { t: f64, domain: &'static str },

    #[error("invalid breakpoints: {0}")]
    Breakpoints(String),

    #[error("invalid function data: {0}")]
    Invalid(String),

    #[error(
        "unbounded variation suspected: partition sums still growing after \
         {doublings} doublings (last sum {last_sum:.6e})"
    )]
    UnboundedVariation { doublings: u32, last_sum: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("integration bounds [{a}, {b}] must satisfy 0 <= a <= b <= 1")]
    Bounds { a: f64, b: f64 },

    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),

    #[error("quadrature did not reach tolerance {tol:.3e}: value {value:.12e}, error estimate {error:.3e}")]
    NonConvergence { value: f64, error: f64, tol: f64 },

    #[error("integrand is not of bounded variation: {0}")]
    NotBoundedVariation(RegulatedError),

    #[error("non-finite integrand value at t = {0}")]
    NonFinite(f64),

    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("eta = {0} out of [0,1]")]
    Eta(f64),

    #[error("beta = {0} is not finite")]
    Beta(f64),

    #[error("M = {0} must be finite and nonnegative")]
    VariationBound(f64),

    #[error("g(0, {x}) = {value}, but g must vanish at t = 0")]
    CouplingAtZero { x: f64, value: f64 },

    #[error("grid needs at least 2 base points, got {0}")]
    GridSize(usize),

    #[error("profile does not live on the operator grid")]
    GridMismatch,

    #[error(transparent)]
    Integrate(#[from] IntegrateError),

    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("smallness condition fails: (|beta|+2)*||K|| = {smallness} >= 1")]
    Condition { smallness: f64 },

    #[error("invalid solver option: {0}")]
    Options(String),

    #[error(transparent)]
    Problem(#[from] ProblemError),

    #[error(transparent)]
    Integrate(#[from] IntegrateError),

    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog name `{0}`")]
    Unknown(String),

    #[error("`{name}` cannot be used as {role}")]
    Role { name: String, role: &'static str },

    #[error("malformed catalog entry `{0}`")]
    Syntax(String),

    #[error("bad arguments for `{name}`: {reason}")]
    Arguments { name: String, reason: String },

    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}
