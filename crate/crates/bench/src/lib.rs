//! Benchmark fixtures shared by the criterion targets.

use std::sync::Arc;

use distbvp::{catalog, Grid, Profile, ProblemSpec, SolutionProfile};

/// Heaviside reference problem with a smooth iterate of moderate size on a
/// `base`-point grid.
pub fn heaviside_fixture(base: usize) -> (ProblemSpec, Arc<Grid>, SolutionProfile) {
    let spec = catalog::heaviside_problem();
    let grid = Arc::new(spec.grid(base).expect("valid grid"));
    let x = SolutionProfile::linear(Profile::sample(Arc::clone(&grid), |t| 2.0 + (3.0 * t).sin()));
    (spec, grid, x)
}
