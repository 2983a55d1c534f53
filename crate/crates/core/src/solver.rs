//! Hypothesis checks, the a priori radius, damped Picard iteration on the
//! operator and a posteriori verification of a computed solution.

use std::sync::Arc;

use log::{debug, info};
use serde::Serialize;

use crate::error::{IntegrateError, ProblemError, SolveError};
use crate::integrate::{hk_integrate, Integrand, Method};
use crate::operator::{Interpolation, Operator, ProblemSpec, SolutionProfile};
use crate::regulated::{Grid, Profile, DEFAULT_REFINEMENT_LIMIT, DEFAULT_SUP_DENSITY};

/// Uniform points used for `‖K‖`, `‖H‖` and the envelope samples.
const NORM_POINTS: usize = 1025;
/// Damping never drops below this when halved after a residual increase.
pub const DAMPING_FLOOR: f64 = 0.125;

/// `r = (|β|+2)(‖H‖ + 2M‖u‖) / (1 − (|β|+2)‖K‖)`, or `None` when the
/// denominator is not positive.
pub fn radius(beta: f64, norm_k: f64, norm_h: f64, m: f64, norm_u: f64) -> Option<f64> {
    let c = beta.abs() + 2.0;
    let denom = 1.0 - c * norm_k;
    (denom > 0.0).then(|| c * (norm_h + 2.0 * m * norm_u) / denom)
}

/// Sampled check of one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisNote {
    pub hypothesis: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub beta: f64,
    pub eta: f64,
    #[serde(rename = "norm_K")]
    pub norm_k: f64,
    #[serde(rename = "norm_H")]
    pub norm_h: f64,
    pub norm_u: f64,
    /// Certified upper bound of `‖u‖` when `norm_u` is only a grid estimate.
    pub norm_u_upper: Option<f64>,
    #[serde(rename = "M")]
    pub m: f64,
    pub smallness: f64,
    pub condition_ok: bool,
    /// Computed from the certified `‖u‖` bound when one is available.
    pub radius: Option<f64>,
    pub radius_bracket: Option<(f64, f64)>,
    #[serde(rename = "K_method")]
    pub k_method: Method,
    #[serde(rename = "H_method")]
    pub h_method: Method,
    pub notes: Vec<HypothesisNote>,
}

/// `max_t |∫₀ᵗ f|` over a uniform grid.
fn primitive_sup(f: &Integrand, tol: f64) -> Result<(f64, Method), IntegrateError> {
    let pts: Vec<f64> = (0..NORM_POINTS)
        .map(|i| i as f64 / (NORM_POINTS - 1) as f64)
        .collect();
    if f.antiderivative().is_some() {
        let mut best = 0.0f64;
        for &t in &pts {
            best = best.max(hk_integrate(f, 0.0, t, tol)?.value.abs());
        }
        return Ok((best, Method::Antiderivative));
    }
    let mut acc = 0.0;
    let mut best = 0.0f64;
    let mut method = Method::Adaptive;
    for w in pts.windows(2) {
        let r = hk_integrate(f, w[0], w[1], tol)?;
        if r.method == Method::ImproperLimit {
            method = r.method;
        }
        acc += r.value;
        best = best.max(acc.abs());
    }
    Ok((best, method))
}

fn envelope_notes(spec: &ProblemSpec, r: Option<f64>) -> Vec<HypothesisNote> {
    let b = &spec.bounds;
    let ts: Vec<f64> = (1..=64).map(|i| i as f64 / 64.0).collect();
    let mut notes = Vec::new();

    let negative = ts
        .iter()
        .map(|&t| (t, b.k.eval(t).min(b.h.eval(t))))
        .filter(|&(_, v)| v < 0.0)
        .min_by(|x, y| x.1.total_cmp(&y.1));
    notes.push(HypothesisNote {
        hypothesis: "H3",
        holds: negative.is_none(),
        detail: match negative {
            None => "k and h nonnegative at sampled t".into(),
            Some((t, v)) => format!("k or h negative at sampled t = {t} (value {v:.6e})"),
        },
    });

    let reach = r.unwrap_or(10.0).min(1e6);
    let vs: Vec<f64> = (-20..=20).map(|i| reach * i as f64 / 20.0).collect();
    let mut worst: Option<(f64, f64, f64)> = None;
    for &t in &ts {
        for &v in &vs {
            let excess = spec.f.eval(t, v).abs() - (b.k.eval(t) * reach + b.h.eval(t));
            if excess > 1e-12 && worst.is_none_or(|w| excess > w.2) {
                worst = Some((t, v, excess));
            }
        }
    }
    notes.push(HypothesisNote {
        hypothesis: "H3",
        holds: worst.is_none(),
        detail: match worst {
            None => format!("|f(t,v)| <= k(t) r + h(t) at sampled t, |v| <= {reach:.6}"),
            Some((t, v, e)) => format!("|f({t}, {v:.6})| exceeds k r + h by {e:.6e}"),
        },
    });

    let mut var_max = 0.0f64;
    let mut var_failed = None;
    let grid = match spec.grid(65) {
        Ok(g) => Arc::new(g),
        Err(e) => {
            notes.push(HypothesisNote { hypothesis: "H6", holds: false, detail: e.to_string() });
            return notes;
        }
    };
    for level in [-reach, 0.0, reach] {
        let x = SolutionProfile::linear(Profile::continuous(Arc::clone(&grid), vec![level; grid.len()]));
        match spec.g.compose(&x).total_variation(DEFAULT_REFINEMENT_LIMIT) {
            Ok(bv) => var_max = var_max.max(bv.total_variation_bound),
            Err(e) => var_failed = Some(e.to_string()),
        }
    }
    let holds = var_failed.is_none() && var_max <= b.m + 1e-12;
    notes.push(HypothesisNote {
        hypothesis: "H6",
        holds,
        detail: match var_failed {
            Some(e) => e,
            None => format!("var g(., x) = {var_max} on constant probes, M = {}", b.m),
        },
    });
    notes
}

/// `‖K‖`, `‖H‖`, `‖u‖`, the smallness quantity `(|β|+2)‖K‖` and the radius.
///
/// The envelope inequalities and the variation bound are only sampled; their
/// outcome is reported in `notes` and does not affect `condition_ok`.
pub fn check_hypotheses(spec: &ProblemSpec, tol: f64) -> Result<HypothesisReport, SolveError> {
    let (norm_k, k_method) = primitive_sup(&spec.bounds.k, tol)?;
    let (norm_h, h_method) = primitive_sup(&spec.bounds.h, tol)?;
    let bounds = spec.u.sup_norm_bounds(DEFAULT_SUP_DENSITY);
    let (beta, m) = (spec.beta, spec.bounds.m);
    let smallness = (beta.abs() + 2.0) * norm_k;
    let at = |nu: f64| radius(beta, norm_k, norm_h, m, nu);
    let (radius, radius_bracket) = match bounds.upper {
        Some(up) if up != bounds.lower => {
            let bracket = at(bounds.lower).zip(at(up));
            (at(up), bracket)
        }
        _ => (at(bounds.lower), None),
    };
    let notes = envelope_notes(spec, radius);
    Ok(HypothesisReport {
        beta,
        eta: spec.eta,
        norm_k,
        norm_h,
        norm_u: bounds.lower,
        norm_u_upper: bounds.upper.filter(|&u| u != bounds.lower),
        m,
        smallness,
        condition_ok: smallness < 1.0,
        radius,
        radius_bracket,
        k_method,
        h_method,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Uniform base points; η and the jumps of `u` are added.
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Quadrature tolerance inside the operator; `tol / 100` when unset.
    pub quad_tol: Option<f64>,
    /// Run even when the smallness condition fails.
    pub override_condition: bool,
    pub interpolation: Interpolation,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid: 1025,
            tol: 1e-8,
            max_iter: 200,
            damping: 1.0,
            quad_tol: None,
            override_condition: false,
            interpolation: Interpolation::Hermite,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), SolveError> {
        if self.grid < 2 {
            return Err(SolveError::Options(format!("grid = {} (need >= 2)", self.grid)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SolveError::Options(format!("tol = {} (need > 0)", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(SolveError::Options("max_iter = 0".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolveError::Options(format!("damping = {} (need 0 < d <= 1)", self.damping)));
        }
        if let Some(q) = self.quad_tol {
            if !(q > 0.0 && q.is_finite()) {
                return Err(SolveError::Options(format!("quad_tol = {q} (need > 0)")));
            }
        }
        Ok(())
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quad_tol.unwrap_or(self.tol * 1e-2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// `T` applied to the best iterate, so `Dx` and both recorded boundary
    /// fields come straight from the integral identity.
    pub solution: SolutionProfile,
    pub iterations: usize,
    /// `‖x − Tx‖` for the best iterate.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    /// `(|x(0) − β Dx(0)|, |Dx(1) + Dx(η)|)`.
    pub bc_residuals: (f64, f64),
    pub norm_x: f64,
    pub radius: Option<f64>,
    pub within_ball: Option<bool>,
    pub converged: bool,
    pub final_damping: f64,
    pub report: HypothesisReport,
}

/// Boundary residuals of a profile from its own grid values.
pub fn boundary_residuals(spec: &ProblemSpec, p: &SolutionProfile) -> (f64, f64) {
    let dx = p.dx.values();
    let bc0 = (p.x.values()[0] - spec.beta * dx[0]).abs();
    let bc1 = match p.grid().index_of(spec.eta) {
        Some(e) => (dx[dx.len() - 1] + dx[e]).abs(),
        None => f64::NAN,
    };
    (bc0, bc1)
}

/// Damped Picard iteration `x ← (1−d) x + d Tx` from `x ≡ 0`.
///
/// The damping is halved (down to [`DAMPING_FLOOR`]) whenever the residual
/// grows. Running out of iterations is not an error: the result carries
/// `converged = false` and the best iterate found.
pub fn solve(spec: &ProblemSpec, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    options.validate()?;
    let report = check_hypotheses(spec, crate::integrate::DEFAULT_TOL)?;
    if !report.condition_ok && !options.override_condition {
        return Err(SolveError::Condition { smallness: report.smallness });
    }
    let grid = Arc::new(spec.grid(options.grid)?);
    let op = Operator::new(spec, Arc::clone(&grid), options.quadrature_tol())?
        .with_interpolation(options.interpolation);

    let mut x = SolutionProfile::zero(grid);
    x.interpolation = options.interpolation;
    let mut damping = options.damping;
    let mut history = Vec::new();
    let mut best: Option<(f64, SolutionProfile)> = None;
    let mut converged = false;
    for iteration in 1..=options.max_iter {
        let tx = op.apply(&x)?;
        let residual = x.x.distance(&tx.x);
        debug!("iteration {iteration}: residual {residual:.3e}, damping {damping}");
        if let Some(&prev) = history.last() {
            if residual > prev && damping > DAMPING_FLOOR {
                damping = (0.5 * damping).max(DAMPING_FLOOR);
            }
        }
        history.push(residual);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, tx.clone()));
        }
        if residual < options.tol {
            converged = true;
            break;
        }
        x = if damping == 1.0 { tx } else { x.combine(1.0 - damping, &tx, damping) };
    }
    let (residual, solution) = best.expect("at least one iteration");
    let norm_x = solution.norm();
    let within_ball = report.radius.map(|r| norm_x <= r + options.tol);
    info!(
        "{} after {} iterations, residual {residual:.3e}",
        if converged { "converged" } else { "no convergence" },
        history.len()
    );
    Ok(SolveResult {
        bc_residuals: boundary_residuals(spec, &solution),
        solution,
        iterations: history.len(),
        residual,
        residual_history: history,
        norm_x,
        radius: report.radius,
        within_ball,
        converged,
        final_damping: damping,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    /// Points of the doubled grid.
    pub grid_points: usize,
    /// `‖x − Tx‖` on the doubled grid.
    pub residual: f64,
    pub bc_residuals: (f64, f64),
    /// Where `Dx` jumps (one-sided values differ).
    pub dx_jumps: Vec<f64>,
    /// Where `u` jumps.
    pub u_jumps: Vec<f64>,
    /// Every jump of `Dx` sits at a jump of `u`.
    pub jumps_agree: bool,
    /// Set when `T` could not be applied; residual is then infinite.
    pub error: Option<String>,
}

/// Recompute `T` for `sol` on the doubled grid and report the residual, the
/// boundary residuals and where `Dx` jumps. Never fails.
pub fn verify(spec: &ProblemSpec, sol: &SolutionProfile, tol: f64) -> Verification {
    let u_jumps: Vec<f64> = spec
        .u
        .breakpoints()
        .iter()
        .filter(|b| b.jump() != 0.0)
        .map(|b| b.at)
        .collect();
    let dx_jumps: Vec<f64> = sol
        .grid()
        .breakpoint_indices()
        .iter()
        .zip(sol.dx.sides())
        .filter(|(_, &(l, r))| l != r)
        .map(|(&i, _)| sol.grid().points()[i])
        .collect();
    let jumps_agree = dx_jumps.iter().all(|t| u_jumps.contains(t));
    let fine: Arc<Grid> = Arc::new(sol.grid().refined());
    let outcome = (|| -> Result<f64, ProblemError> {
        let op = Operator::new(spec, Arc::clone(&fine), tol * 1e-2)?;
        let xf = sol.resample(Arc::clone(&fine));
        let tx = op.apply(&xf)?;
        Ok(xf.x.distance(&tx.x))
    })();
    let (residual, error) = match outcome {
        Ok(r) => (r, None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    Verification {
        grid_points: fine.len(),
        residual,
        bc_residuals: boundary_residuals(spec, sol),
        dx_jumps,
        u_jumps,
        jumps_agree,
        error,
    }
}
