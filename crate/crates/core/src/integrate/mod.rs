//! Kurzweil–Henstock and Kurzweil–Henstock–Stieltjes integration.
//!
//! Three routes are used for `∫ f ds`:
//!
//! - a registered closed-form antiderivative, when one is known;
//! - globally adaptive Gauss–Kronrod quadrature for integrands that are
//!   bounded and piecewise smooth;
//! - an extrapolated improper limit at a registered singular point, which
//!   coincides with the Kurzweil–Henstock integral whenever it exists.
//!
//! `∫ g du` is computed as the jump sum of `u` plus the Riemann–Stieltjes
//! integral against its continuous part.

mod improper;
pub mod kronrod;
mod stieltjes;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use improper::SingularEnd;
pub use stieltjes::TaggedPartition;

use crate::error::IntegrateError;
use crate::regulated::{Profile, RegulatedFn, ScalarFn, DEFAULT_REFINEMENT_LIMIT};

pub(crate) use stieltjes::jump_and_continuous;

/// Default tolerance for smooth integrands.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance on the improper-limit route.
pub const DEFAULT_IMPROPER_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Antiderivative,
    Adaptive,
    ImproperLimit,
    #[serde(rename = "jump-sum+continuous-part")]
    JumpSumContinuous,
    Trapezoid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Antiderivative => "antiderivative",
            Method::Adaptive => "adaptive",
            Method::ImproperLimit => "improper-limit",
            Method::JumpSumContinuous => "jump-sum+continuous-part",
            Method::Trapezoid => "trapezoid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

/// Scalar integrand on `[0, 1]`, optionally with a closed-form
/// antiderivative and a singular point.
#[derive(Clone)]
pub struct Integrand {
    name: String,
    func: ScalarFn,
    antiderivative: Option<ScalarFn>,
    singular_at: Option<f64>,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("antiderivative", &self.antiderivative.is_some())
            .field("singular_at", &self.singular_at)
            .finish()
    }
}

impl Integrand {
    pub fn new(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand {
            name: name.into(),
            func: Arc::new(func),
            antiderivative: None,
            singular_at: None,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        let name = if c == 0.0 { "zero".to_string() } else { format!("const({c})") };
        Integrand::new(name, move |_| c).with_antiderivative(move |t| c * t)
    }

    pub fn with_antiderivative(mut self, a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(a));
        self
    }

    pub fn with_singularity(mut self, at: f64) -> Self {
        self.singular_at = Some(at);
        self
    }

    /// Same integrand with the antiderivative forgotten, forcing a numeric route.
    pub fn numeric_only(&self) -> Self {
        Integrand {
            antiderivative: None,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.func)(t)
    }

    pub fn antiderivative(&self) -> Option<&ScalarFn> {
        self.antiderivative.as_ref()
    }

    pub fn singular_at(&self) -> Option<f64> {
        self.singular_at
    }

    pub(crate) fn func(&self) -> &ScalarFn {
        &self.func
    }
}

fn check_bounds(a: f64, b: f64, tol: f64) -> Result<(), IntegrateError> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(IntegrateError::Bounds { a, b });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(IntegrateError::Tolerance(tol));
    }
    Ok(())
}

/// `∫_a^b f(s) ds` in the Kurzweil–Henstock sense.
pub fn hk_integrate(f: &Integrand, a: f64, b: f64, tol: f64) -> Result<IntegralResult, IntegrateError> {
    check_bounds(a, b, tol)?;
    if let Some(anti) = &f.antiderivative {
        let (lo, hi) = (anti(a), anti(b));
        let value = hi - lo;
        if !value.is_finite() {
            return Err(IntegrateError::NonFinite(if hi.is_finite() { a } else { b }));
        }
        return Ok(IntegralResult {
            value,
            error_estimate: f64::EPSILON * (hi.abs() + lo.abs()),
            method: Method::Antiderivative,
        });
    }
    if a == b {
        return Ok(IntegralResult { value: 0.0, error_estimate: 0.0, method: Method::Adaptive });
    }
    let func = f.func.as_ref();
    match f.singular_at {
        Some(s) if s == a => improper::improper_limit(func, a, b, SingularEnd::Left, tol),
        Some(s) if s == b => improper::improper_limit(func, a, b, SingularEnd::Right, tol),
        Some(s) if s > a && s < b => {
            let left = improper::improper_limit(func, a, s, SingularEnd::Right, 0.5 * tol)?;
            let right = improper::improper_limit(func, s, b, SingularEnd::Left, 0.5 * tol)?;
            Ok(IntegralResult {
                value: left.value + right.value,
                error_estimate: left.error_estimate + right.error_estimate,
                method: Method::ImproperLimit,
            })
        }
        _ => {
            let r = kronrod::adaptive(func, a, b, tol, kronrod::DEFAULT_MAX_PANELS);
            if !r.value.is_finite() {
                return Err(IntegrateError::NonFinite(a));
            }
            if !r.converged {
                return Err(IntegrateError::NonConvergence { value: r.value, error: r.error, tol });
            }
            Ok(IntegralResult { value: r.value, error_estimate: r.error, method: Method::Adaptive })
        }
    }
}

/// `∫_a^b g(s) du(s)` for `g` of bounded variation and any regulated `u`.
///
/// Jumps of `u` at `τ` contribute `g(τ)(u(τ+) - u(τ-))`; at the ends of the
/// interval `u(a-)` is read as `u(a)` and `u(b+)` as `u(b)`. When `u` is a
/// step function the result is the jump sum, computed exactly.
pub fn hks_integrate(
    g: &RegulatedFn,
    u: &RegulatedFn,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralResult, IntegrateError> {
    check_bounds(a, b, tol)?;
    g.total_variation(DEFAULT_REFINEMENT_LIMIT)
        .map_err(IntegrateError::NotBoundedVariation)?;
    let (value, error_estimate) = jump_and_continuous(g, u, a, b, tol);
    Ok(IntegralResult {
        value,
        error_estimate,
        method: Method::JumpSumContinuous,
    })
}

/// Cumulative trapezoid integral `∫₀^{tᵢ} p` of a profile at every grid point.
///
/// Each cell uses the right value at its left end and the left value at its
/// right end, so jumps never leak into a neighbouring cell. Exact for the
/// piecewise linear function the profile represents.
pub fn cumulative_trapezoid(p: &Profile) -> Vec<f64> {
    let pts = p.grid().points();
    let mut out = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..pts.len() - 1 {
        acc += 0.5 * (pts[i + 1] - pts[i]) * (p.right_at(i) + p.left_at(i + 1));
        out.push(acc);
    }
    out
}

/// `∫_a^t p(s) ds` of a regulated grid profile.
///
/// The value is the trapezoid sum on the profile's grid (exact for the
/// piecewise linear profile). The error estimate compares it with the sum on
/// the grid with every other point removed inside each jump-free segment.
pub fn iterated_integrate(p: &Profile, a: f64, t: f64, tol: f64) -> Result<IntegralResult, IntegrateError> {
    check_bounds(a, t, tol)?;
    if a == t {
        return Ok(IntegralResult { value: 0.0, error_estimate: 0.0, method: Method::Trapezoid });
    }
    let grid = p.grid();
    let pts = grid.points();
    // Nodes in [a, t]: the interior grid points plus both ends.
    let mut nodes: Vec<(f64, f64, f64, bool)> = vec![(a, p.left(a), p.right(a), true)];
    for (i, &s) in pts.iter().enumerate() {
        if s > a && s < t {
            let is_break = grid.break_slot(i).is_some();
            nodes.push((s, p.left_at(i), p.right_at(i), is_break));
        }
    }
    nodes.push((t, p.left(t), p.right(t), true));

    let fine: f64 = nodes
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].2 + w[1].1))
        .sum();

    // Coarse sum: drop every other node inside each segment between breaks.
    let mut coarse = 0.0;
    let mut seg_start = 0;
    for j in 1..nodes.len() {
        if nodes[j].3 {
            let seg = &nodes[seg_start..=j];
            let mut kept: Vec<usize> = (0..seg.len()).step_by(2).collect();
            if *kept.last().unwrap() != seg.len() - 1 {
                kept.push(seg.len() - 1);
            }
            for w in kept.windows(2) {
                let (l, r) = (&seg[w[0]], &seg[w[1]]);
                coarse += 0.5 * (r.0 - l.0) * (l.2 + r.1);
            }
            seg_start = j;
        }
    }
    Ok(IntegralResult {
        value: fine,
        error_estimate: (fine - coarse).abs() / 3.0,
        method: Method::Trapezoid,
    })
}
