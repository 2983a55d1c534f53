//! The integral operator
//!
//! ```text
//!     Tx(t) = (t + β)/2 · (F(1) + F(η) + G(1) + G(η)) − ∫₀ᵗ F − ∫₀ᵗ G,
//!     F(t) = ∫₀ᵗ f(s, x(s)) ds,   G(t) = ∫₀ᵗ g(s, x(s)) du(s),
//! ```
//!
//! whose fixed points solve the boundary value problem, and the derivative
//! `Dx(t) = Dx(0) − F(t) − G(t)` with `Dx(0) = (F(1) + F(η) + G(1) + G(η))/2`.
//!
//! `F` is accumulated cell by cell with adaptive Gauss–Kronrod panels, so
//! every grid value (including `F(η)` and `F(1)`) carries full quadrature
//! accuracy. Its running integral uses the exact identity
//! `∫_{tᵢ}^{tᵢ₊₁} F = h F(tᵢ) + ∫_{tᵢ}^{tᵢ₊₁} (tᵢ₊₁ − s) f(s) ds`.
//! `∫ G` is taken cell by cell from `G(tᵢ+)` plus the cell integral of `u`
//! weighted by the coupling at the cell midpoint, which is exact whenever the
//! coupling is constant on the cell (as for `g*`) even if `u` is nowhere
//! differentiable.

mod problem;
mod profile;

use std::sync::Arc;

pub use problem::{BoundData, Coupling, Forcing, ProblemSpec, StateFn};
pub use profile::{Interpolation, SolutionProfile};

use crate::error::{IntegrateError, ProblemError};
use crate::integrate::kronrod::adaptive;
use crate::integrate::jump_and_continuous;
use crate::integrate::{hk_integrate, Integrand};
use crate::regulated::{Grid, Profile, DEFAULT_REFINEMENT_LIMIT};

/// Panel budget for one grid cell of the state part of `f`.
const CELL_PANELS: usize = 256;

/// `F`, `G` and their running integrals on the operator grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub f: Profile,
    pub g: Profile,
    pub f_integral: Vec<f64>,
    pub g_integral: Vec<f64>,
    /// Sum of the quadrature error estimates that went into `f` and `g`.
    pub error_estimate: f64,
}

/// Per-cell increments of the `t`-only source term, computed once per grid.
#[derive(Debug, Clone)]
struct SourceTable {
    increments: Vec<f64>,
    moments: Vec<f64>,
    error: f64,
}

/// `T` for one problem on one grid.
#[derive(Debug, Clone)]
pub struct Operator<'a> {
    spec: &'a ProblemSpec,
    grid: Arc<Grid>,
    eta_index: usize,
    tol: f64,
    source: Option<SourceTable>,
    interpolation: Interpolation,
}

impl<'a> Operator<'a> {
    /// Fails with [`ProblemError::GridMismatch`] unless the grid contains η
    /// and carries every breakpoint of `u` as a registered breakpoint.
    pub fn new(spec: &'a ProblemSpec, grid: Arc<Grid>, tol: f64) -> Result<Self, ProblemError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(IntegrateError::Tolerance(tol).into());
        }
        let eta_index = grid.index_of(spec.eta).ok_or(ProblemError::GridMismatch)?;
        let u_breaks: Vec<f64> = spec.u.breakpoints().iter().map(|b| b.at).collect();
        if u_breaks != grid.breakpoints() {
            return Err(ProblemError::GridMismatch);
        }
        let source = match spec.f.source() {
            Some(s) => Some(source_table(s, &grid, tol)?),
            None => None,
        };
        Ok(Operator {
            spec,
            grid,
            eta_index,
            tol,
            source,
            interpolation: Interpolation::Hermite,
        })
    }

    /// Interpolation attached to the profiles this operator produces.
    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn check(&self, x: &SolutionProfile) -> Result<(), ProblemError> {
        if Arc::ptr_eq(x.grid(), &self.grid) || **x.grid() == *self.grid {
            Ok(())
        } else {
            Err(ProblemError::GridMismatch)
        }
    }

    pub fn profile_f(&self, x: &SolutionProfile) -> Result<(Profile, Vec<f64>, f64), ProblemError> {
        self.check(x)?;
        let pts = self.grid.points();
        let n = pts.len();
        let f = &self.spec.f;
        let mut values = vec![0.0; n];
        let mut integral = vec![0.0; n];
        let mut error = self.source.as_ref().map_or(0.0, |s| s.error);
        for i in 0..n - 1 {
            let (t0, t1) = (pts[i], pts[i + 1]);
            let h = t1 - t0;
            let state = |s: f64| f.state(s, x.eval_in_cell(i, s));
            let d = adaptive(&state, t0, t1, self.tol * h, CELL_PANELS);
            let m = adaptive(&|s: f64| (t1 - s) * state(s), t0, t1, self.tol * h * h, CELL_PANELS);
            if !(d.value.is_finite() && m.value.is_finite()) {
                return Err(IntegrateError::NonFinite(t0).into());
            }
            let (ds, ms) = self
                .source
                .as_ref()
                .map_or((0.0, 0.0), |s| (s.increments[i], s.moments[i]));
            values[i + 1] = values[i] + (d.value + ds);
            integral[i + 1] = integral[i] + (h * values[i] + (m.value + ms));
            error += d.error + m.error;
        }
        let sides = vec![(0.0, 0.0); self.grid.breakpoint_indices().len()];
        let mut profile = Profile::new(Arc::clone(&self.grid), values, sides)?;
        profile = continuous_sides(profile);
        Ok((profile, integral, error))
    }

    pub fn profile_g(&self, x: &SolutionProfile) -> Result<(Profile, Vec<f64>, f64), ProblemError> {
        self.check(x)?;
        let pts = self.grid.points();
        let n = pts.len();
        let u = &self.spec.u;
        let gx = self.spec.g.compose(x);
        gx.total_variation(DEFAULT_REFINEMENT_LIMIT)
            .map_err(IntegrateError::NotBoundedVariation)?;
        let mut values = vec![0.0; n];
        let mut error = 0.0;
        for i in 0..n - 1 {
            let (t0, t1) = (pts[i], pts[i + 1]);
            let (v, e) = jump_and_continuous(&gx, u, t0, t1, self.tol * (t1 - t0));
            if !v.is_finite() {
                return Err(IntegrateError::NonFinite(t0).into());
            }
            values[i + 1] = values[i] + v;
            error += e;
        }
        let sides = self
            .grid
            .breakpoint_indices()
            .iter()
            .map(|&j| {
                let tau = pts[j];
                let weight = gx.value(tau);
                let below = weight * (u.value(tau) - u.left(tau));
                let above = weight * (u.right(tau) - u.value(tau));
                (values[j] - below, values[j] + above)
            })
            .collect();
        let profile = Profile::new(Arc::clone(&self.grid), values, sides)?;
        // Inside a cell u has no jumps, so with the coupling frozen at the
        // midpoint G(s) = G(t₀+) + g(mid)(u(s) − u(t₀+)).
        let mut integral = vec![0.0; n];
        for i in 0..n - 1 {
            let (t0, t1) = (pts[i], pts[i + 1]);
            let h = t1 - t0;
            let rise = if u.has_continuous_part() {
                let weight = gx.value(0.5 * (t0 + t1));
                weight * (u.cell_integral(t0, t1, self.tol * h) - h * u.right(t0))
            } else {
                0.0
            };
            integral[i + 1] = integral[i] + (h * profile.right_at(i) + rise);
        }
        Ok((profile, integral, error))
    }

    pub fn profiles(&self, x: &SolutionProfile) -> Result<Profiles, ProblemError> {
        let (f, f_integral, fe) = self.profile_f(x)?;
        let (g, g_integral, ge) = self.profile_g(x)?;
        Ok(Profiles {
            f,
            g,
            f_integral,
            g_integral,
            error_estimate: fe + ge,
        })
    }

    /// `Tx` together with its derivative, `Dx(0)` and `x(0)`.
    pub fn apply(&self, x: &SolutionProfile) -> Result<SolutionProfile, ProblemError> {
        let p = self.profiles(x)?;
        Ok(self.assemble(&p))
    }

    /// `Dx(t) = Dx(0) − F(t) − G(t)` for the profiles of `x`.
    pub fn reconstruct_dx(&self, x: &SolutionProfile) -> Result<Profile, ProblemError> {
        Ok(self.assemble(&self.profiles(x)?).dx)
    }

    fn assemble(&self, p: &Profiles) -> SolutionProfile {
        let pts = self.grid.points();
        let last = pts.len() - 1;
        let (fv, gv) = (p.f.values(), p.g.values());
        let e = self.eta_index;
        let bracket = fv[last] + fv[e] + gv[last] + gv[e];
        let dx0 = 0.5 * bracket;
        let beta = self.spec.beta;
        let x0 = beta * dx0;
        // (t + β)·dx0 evaluates to exactly β·dx0 at t = 0.
        let xs = pts
            .iter()
            .zip(p.f_integral.iter().zip(&p.g_integral))
            .map(|(&t, (&fi, &gi))| (t + beta) * dx0 - fi - gi)
            .collect();
        let dxs = fv.iter().zip(gv).map(|(&f, &g)| dx0 - f - g).collect();
        let dx_sides = self
            .grid
            .breakpoint_indices()
            .iter()
            .zip(p.g.sides())
            .map(|(&j, &(gl, gr))| (dx0 - fv[j] - gl, dx0 - fv[j] - gr))
            .collect();
        let x = Profile::continuous(Arc::clone(&self.grid), xs);
        let dx = Profile::new(Arc::clone(&self.grid), dxs, dx_sides).expect("shape matches grid");
        SolutionProfile {
            x,
            dx,
            dx0,
            x0,
            interpolation: self.interpolation,
        }
    }
}

/// Sides equal to the point values.
fn continuous_sides(p: Profile) -> Profile {
    let values = p.values().to_vec();
    Profile::continuous(Arc::clone(p.grid()), values)
}

fn source_table(s: &Integrand, grid: &Grid, tol: f64) -> Result<SourceTable, ProblemError> {
    let pts = grid.points();
    let mut increments = Vec::with_capacity(pts.len() - 1);
    let mut moments = Vec::with_capacity(pts.len() - 1);
    let mut error = 0.0;
    for w in pts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        // Limits at a singular point cannot be pushed to per-cell accuracy.
        let cell_tol = match s.singular_at() {
            Some(at) if (t0..=t1).contains(&at) => tol,
            _ => tol * h,
        };
        let inc = hk_integrate(s, t0, t1, cell_tol)?;
        let moment = match s.antiderivative() {
            Some(anti) => {
                let base = anti(t0);
                let r = adaptive(&|t: f64| anti(t) - base, t0, t1, tol * h * h, CELL_PANELS);
                error += r.error;
                r.value
            }
            None => {
                let func = Arc::clone(s.func());
                let mut weighted = Integrand::new("moment", move |t| (t1 - t) * func(t));
                if let Some(at) = s.singular_at() {
                    weighted = weighted.with_singularity(at);
                }
                let r = hk_integrate(&weighted, t0, t1, cell_tol * h)?;
                error += r.error_estimate;
                r.value
            }
        };
        error += inc.error_estimate;
        increments.push(inc.value);
        moments.push(moment);
    }
    Ok(SourceTable {
        increments,
        moments,
        error,
    })
}

fn operator_for<'a>(spec: &'a ProblemSpec, x: &SolutionProfile, tol: f64) -> Result<Operator<'a>, ProblemError> {
    Ok(Operator::new(spec, Arc::clone(x.grid()), tol)?.with_interpolation(x.interpolation))
}

/// `F(t) = ∫₀ᵗ f(s, x(s)) ds` on the grid of `x`.
pub fn profile_f(spec: &ProblemSpec, x: &SolutionProfile, tol: f64) -> Result<Profile, ProblemError> {
    Ok(operator_for(spec, x, tol)?.profile_f(x)?.0)
}

/// `G(t) = ∫₀ᵗ g(s, x(s)) du(s)` on the grid of `x`, with one-sided values at
/// the jumps of `u`.
pub fn profile_g(spec: &ProblemSpec, x: &SolutionProfile, tol: f64) -> Result<Profile, ProblemError> {
    Ok(operator_for(spec, x, tol)?.profile_g(x)?.0)
}

pub fn apply_t(spec: &ProblemSpec, x: &SolutionProfile, tol: f64) -> Result<SolutionProfile, ProblemError> {
    operator_for(spec, x, tol)?.apply(x)
}

pub fn reconstruct_dx(spec: &ProblemSpec, x: &SolutionProfile, tol: f64) -> Result<Profile, ProblemError> {
    operator_for(spec, x, tol)?.reconstruct_dx(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regulated::RegulatedFn;

    fn bounds() -> BoundData {
        BoundData {
            k: Integrand::zero(),
            h: Integrand::zero(),
            m: 0.0,
        }
    }

    fn spec(f: Forcing, g: Coupling, u: RegulatedFn, beta: f64, eta: f64) -> ProblemSpec {
        ProblemSpec::new(f, g, u, beta, eta, bounds()).unwrap()
    }

    fn zero_on(spec: &ProblemSpec, base: usize) -> SolutionProfile {
        SolutionProfile::zero(Arc::new(spec.grid(base).unwrap()))
    }

    #[test]
    fn constant_forcing_closed_form() {
        let c = 1.5;
        for &(beta, eta) in &[(4.0, 0.25), (-1.0 / 6.0, 2.0 / 3.0), (0.3, 1.0)] {
            let s = spec(Forcing::constant(c), Coupling::zero(), RegulatedFn::zero(), beta, eta);
            let tx = apply_t(&s, &zero_on(&s, 65), 1e-10).unwrap();
            for (&t, &v) in tx.grid().points().iter().zip(tx.x.values()) {
                let exact = c * (1.0 + eta) * (t + beta) / 2.0 - c * t * t / 2.0;
                assert!((v - exact).abs() < 1e-12, "t={t}: {v} vs {exact}");
            }
            let last = tx.dx.values().len() - 1;
            let e = tx.grid().index_of(eta).unwrap();
            assert!((tx.dx.values()[last] + tx.dx.values()[e]).abs() < 1e-12);
            assert_eq!(tx.x0, beta * tx.dx0);
            assert_eq!(tx.x.values()[0], tx.x0);
        }
    }

    #[test]
    fn heaviside_coupling_jumps_at_the_center() {
        let s = spec(
            Forcing::zero(),
            Coupling::g_star(),
            RegulatedFn::heaviside(0.5).unwrap(),
            0.0,
            0.25,
        );
        let x = zero_on(&s, 33);
        let g = profile_g(&s, &x, 1e-10).unwrap();
        let half = x.grid().index_of(0.5).unwrap();
        assert_eq!(g.values()[half - 1], 0.0);
        assert_eq!(g.values()[half], 1.0);
        assert_eq!(g.sides(), &[(0.0, 1.0)]);
        let dx = reconstruct_dx(&s, &x, 1e-10).unwrap();
        let (l, r) = dx.sides()[0];
        assert_eq!(r - l, -1.0);
    }

    #[test]
    fn zero_problem_maps_everything_to_zero() {
        let s = spec(Forcing::zero(), Coupling::zero(), RegulatedFn::zero(), 2.0, 0.5);
        let grid = Arc::new(s.grid(17).unwrap());
        let x = SolutionProfile::linear(Profile::sample(grid, |t| 3.0 * t - 1.0));
        let tx = apply_t(&s, &x, 1e-10).unwrap();
        assert!(tx.x.values().iter().all(|&v| v == 0.0));
        assert!(tx.dx.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grid_without_breakpoints_is_rejected() {
        let s = spec(
            Forcing::zero(),
            Coupling::g_star(),
            RegulatedFn::heaviside(0.3).unwrap(),
            0.0,
            0.5,
        );
        let grid = Arc::new(Grid::new(11, &[0.5], &[]).unwrap());
        assert_eq!(
            Operator::new(&s, grid, 1e-8).unwrap_err(),
            ProblemError::GridMismatch
        );
    }

    #[test]
    fn singular_source_matches_antiderivative() {
        // h(t) = 1 + 2t sin(t⁻²) − (2/t) cos(t⁻²), F(t) = t + t² sin(t⁻²).
        let h = |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                1.0 + 2.0 * t * (t.powi(-2)).sin() - 2.0 / t * (t.powi(-2)).cos()
            }
        };
        let exact = |t: f64| if t == 0.0 { 0.0 } else { t + t * t * (t.powi(-2)).sin() };
        let numeric = Integrand::new("h", h).with_singularity(0.0);
        let s = spec(
            Forcing::zero().with_source(numeric),
            Coupling::zero(),
            RegulatedFn::zero(),
            0.0,
            0.5,
        );
        let x = zero_on(&s, 17);
        let f = profile_f(&s, &x, 1e-5).unwrap();
        for (&t, &v) in x.grid().points().iter().zip(f.values()) {
            assert!((v - exact(t)).abs() < 5e-5, "t={t}: {v} vs {}", exact(t));
        }
    }
}
