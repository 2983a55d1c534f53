//! Regulated functions on `[0, 1]`.
//!
//! A regulated function has finite one-sided limits everywhere. Every kind
//! here keeps an explicit registry of the interior points where those limits
//! may differ; away from the registry the function is continuous.

mod sampled;
mod step;
mod weierstrass;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use sampled::{Grid, Profile};
pub use step::StepFn;
pub use weierstrass::{partial_sum as weierstrass_partial_sum, terms_for_tolerance, weierstrass};

use crate::error::RegulatedError;
use crate::integrate::kronrod::adaptive;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default number of grid cells for sup-norm estimates.
pub const DEFAULT_SUP_DENSITY: usize = 10_000;
/// Panel budget of [`RegulatedFn::cell_integral`] on closed forms.
const CELL_INTEGRAL_PANELS: usize = 1 << 10;
/// Default number of doublings in the total-variation refinement.
pub const DEFAULT_REFINEMENT_LIMIT: u32 = 16;
/// Cells of the coarsest partition used by the refinement.
const INITIAL_PARTITION: usize = 64;
/// Relative change between doublings that counts as stabilized.
const VARIATION_STABLE: f64 = 1e-6;

/// A point where one-sided limits may differ from each other or from the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub at: f64,
    pub left: f64,
    pub right: f64,
    pub value: f64,
}

impl Breakpoint {
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }
}

/// Total variation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BVData {
    /// Exact variation, or an upper estimate from partition refinement.
    pub total_variation_bound: f64,
    /// `(f(0), f(1))`.
    pub endpoint_values: (f64, f64),
    /// Whether the bound is exact rather than a refinement estimate.
    pub exact: bool,
}

/// Bracket on a sup norm. `upper` is `None` when no certified bound is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl NormBounds {
    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }
}

#[derive(Clone)]
struct ClosedForm {
    func: ScalarFn,
    breakpoints: Vec<Breakpoint>,
    right_at_zero: Option<f64>,
    left_at_one: Option<f64>,
    /// Interior points splitting `[0,1]` (together with the breakpoints)
    /// into pieces on which the function is monotone.
    monotone_knots: Option<Vec<f64>>,
}

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Step(StepFn),
    Weierstrass { terms: u32 },
    Closed(ClosedForm),
    Sampled(Profile),
}

/// A real regulated function on `[0, 1]`. Immutable once built.
#[derive(Clone)]
pub struct RegulatedFn {
    name: String,
    kind: Kind,
    eval_tolerance: f64,
}

impl fmt::Debug for RegulatedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegulatedFn")
            .field("name", &self.name)
            .field("eval_tolerance", &self.eval_tolerance)
            .finish_non_exhaustive()
    }
}

fn check_closed(t: f64) -> Result<(), RegulatedError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(RegulatedError::Domain { t, domain: "[0,1]" })
    }
}

impl RegulatedFn {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        RegulatedFn {
            name: if c == 0.0 { "zero".into() } else { format!("const({c})") },
            kind: Kind::Constant(c),
            eval_tolerance: 0.0,
        }
    }

    pub fn step(name: impl Into<String>, step: StepFn) -> Self {
        RegulatedFn {
            name: name.into(),
            kind: Kind::Step(step),
            eval_tolerance: 0.0,
        }
    }

    pub fn heaviside(center: f64) -> Result<Self, RegulatedError> {
        Ok(Self::step(format!("heaviside({center})"), StepFn::heaviside(center)?))
    }

    pub fn g_star() -> Self {
        Self::step("gstar", StepFn::g_star())
    }

    /// Weierstrass series truncated so that the absolute error is at most `tolerance`.
    pub fn weierstrass(tolerance: f64) -> Result<Self, RegulatedError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(RegulatedError::Invalid(format!(
                "weierstrass tolerance must be positive, got {tolerance}"
            )));
        }
        let terms = terms_for_tolerance(tolerance);
        Ok(RegulatedFn {
            name: format!("weierstrass({tolerance})"),
            kind: Kind::Weierstrass { terms },
            eval_tolerance: tolerance,
        })
    }

    /// Weierstrass partial sum with exactly `terms` terms.
    pub fn weierstrass_terms(terms: u32) -> Self {
        RegulatedFn {
            name: format!("weierstrass[{terms} terms]"),
            kind: Kind::Weierstrass { terms },
            eval_tolerance: 0.5f64.powi(terms as i32),
        }
    }

    /// Function continuous on `[0,1]`, given by a closure.
    pub fn closed_form(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RegulatedFn {
            name: name.into(),
            kind: Kind::Closed(ClosedForm {
                func: Arc::new(func),
                breakpoints: Vec::new(),
                right_at_zero: None,
                left_at_one: None,
                monotone_knots: None,
            }),
            eval_tolerance: 0.0,
        }
    }

    /// Registers a jump of a closed form. The closure's own value at `bp.at`
    /// is ignored in favour of `bp.value`.
    pub fn with_breakpoint(mut self, bp: Breakpoint) -> Result<Self, RegulatedError> {
        let Kind::Closed(cf) = &mut self.kind else {
            return Err(RegulatedError::Invalid("only closed forms take extra breakpoints".into()));
        };
        let at = cf.breakpoints.partition_point(|b| b.at < bp.at);
        cf.breakpoints.insert(at, bp);
        let knots: Vec<f64> = cf.breakpoints.iter().map(|b| b.at).collect();
        step::check_knots(&knots)?;
        Ok(self)
    }

    /// Registers `f(0+)` for a closed form whose value at 0 is isolated.
    pub fn with_right_limit_at_zero(mut self, value: f64) -> Self {
        if let Kind::Closed(cf) = &mut self.kind {
            cf.right_at_zero = Some(value);
        }
        self
    }

    pub fn with_left_limit_at_one(mut self, value: f64) -> Self {
        if let Kind::Closed(cf) = &mut self.kind {
            cf.left_at_one = Some(value);
        }
        self
    }

    /// Declares the closed form monotone between consecutive points of
    /// `knots ∪ breakpoints ∪ {0, 1}`; sup norm and variation become exact.
    pub fn monotone_between(mut self, mut knots: Vec<f64>) -> Result<Self, RegulatedError> {
        knots.sort_by(f64::total_cmp);
        step::check_knots(&knots)?;
        if let Kind::Closed(cf) = &mut self.kind {
            cf.monotone_knots = Some(knots);
        }
        Ok(self)
    }

    pub fn sampled(name: impl Into<String>, profile: Profile) -> Self {
        RegulatedFn {
            name: name.into(),
            kind: Kind::Sampled(profile),
            eval_tolerance: 0.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval_tolerance(&self) -> f64 {
        self.eval_tolerance
    }

    /// False for functions whose distributional derivative is a pure sum of jumps.
    pub fn has_continuous_part(&self) -> bool {
        !matches!(self.kind, Kind::Constant(_) | Kind::Step(_))
    }

    pub fn as_step(&self) -> Option<&StepFn> {
        match &self.kind {
            Kind::Step(s) => Some(s),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, RegulatedError> {
        check_closed(t)?;
        Ok(self.value(t))
    }

    pub fn left_limit(&self, t: f64) -> Result<f64, RegulatedError> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(RegulatedError::Domain { t, domain: "(0,1]" });
        }
        Ok(self.left(t))
    }

    pub fn right_limit(&self, t: f64) -> Result<f64, RegulatedError> {
        if !(0.0..1.0).contains(&t) {
            return Err(RegulatedError::Domain { t, domain: "[0,1)" });
        }
        Ok(self.right(t))
    }

    /// Value at `t`, assuming `t ∈ [0, 1]`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::Step(s) => s.value(t),
            Kind::Weierstrass { terms } => weierstrass_partial_sum(t, *terms),
            Kind::Closed(cf) => match cf.find(t) {
                Some(bp) => bp.value,
                None => (cf.func)(t),
            },
            Kind::Sampled(p) => p.value(t),
        }
    }

    /// `f(t-)`, assuming `t ∈ (0, 1]`.
    pub(crate) fn left(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Step(s) => s.left(t),
            Kind::Closed(cf) => match cf.find(t) {
                Some(bp) => bp.left,
                None if t == 1.0 => cf.left_at_one.unwrap_or_else(|| (cf.func)(t)),
                None => (cf.func)(t),
            },
            Kind::Sampled(p) => p.left(t),
            _ => self.value(t),
        }
    }

    /// `f(t+)`, assuming `t ∈ [0, 1)`.
    pub(crate) fn right(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Step(s) => s.right(t),
            Kind::Closed(cf) => match cf.find(t) {
                Some(bp) => bp.right,
                None if t == 0.0 => cf.right_at_zero.unwrap_or_else(|| (cf.func)(t)),
                None => (cf.func)(t),
            },
            Kind::Sampled(p) => p.right(t),
            _ => self.value(t),
        }
    }

    /// `∫_a^b f` over an interval with no breakpoint strictly inside.
    ///
    /// Exact for constants, steps and the Weierstrass partial sums (term by
    /// term); adaptive quadrature to `tol` otherwise.
    pub(crate) fn cell_integral(&self, a: f64, b: f64, tol: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => c * (b - a),
            Kind::Step(s) => s.value(0.5 * (a + b)) * (b - a),
            Kind::Weierstrass { terms } => weierstrass::partial_sum_integral(a, b, *terms),
            _ => adaptive(&|t| self.value(t), a, b, tol, CELL_INTEGRAL_PANELS).value,
        }
    }

    /// Interior breakpoints, increasing.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        match &self.kind {
            Kind::Step(s) => s.breakpoints(),
            Kind::Closed(cf) => cf.breakpoints.clone(),
            Kind::Sampled(p) => p.breakpoint_list(),
            _ => Vec::new(),
        }
    }

    /// Every point where the function may fail to be continuous, endpoints
    /// included when the value there differs from the one-sided limit.
    fn discontinuity_points(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        pts.extend(self.breakpoints().iter().map(|b| b.at));
        pts.push(1.0);
        pts
    }

    /// Sup norm estimate: maximum of `|f|` over `grid_density + 1` uniform
    /// points, all breakpoints and all one-sided values.
    ///
    /// Exact for constants, step functions, sampled profiles and closed forms
    /// declared piecewise monotone; a lower estimate otherwise. Nested grids
    /// (`grid_density` multiplied by an integer) never decrease the estimate.
    pub fn sup_norm(&self, grid_density: usize) -> f64 {
        self.sup_norm_bounds(grid_density).lower
    }

    pub fn sup_norm_bounds(&self, grid_density: usize) -> NormBounds {
        let exact = |v: f64| NormBounds { lower: v, upper: Some(v) };
        match &self.kind {
            Kind::Constant(c) => exact(c.abs()),
            Kind::Step(s) => exact(s.sup_norm()),
            Kind::Sampled(p) => exact(p.sup_norm()),
            Kind::Closed(cf) if cf.monotone_knots.is_some() => {
                exact(self.piece_ends().iter().fold(0.0, |m, v| m.max(v.abs())))
            }
            Kind::Weierstrass { .. } => NormBounds {
                lower: self.grid_sup(grid_density),
                // Σ 2⁻ⁿ over all n bounds both the series and its partial sums.
                upper: Some(1.0),
            },
            Kind::Closed(_) => NormBounds {
                lower: self.grid_sup(grid_density),
                upper: None,
            },
        }
    }

    fn grid_sup(&self, grid_density: usize) -> f64 {
        let n = grid_density.max(2);
        let mut best = (0..=n)
            .map(|i| self.value(i as f64 / n as f64).abs())
            .fold(0.0, f64::max);
        for bp in self.breakpoints() {
            best = best.max(bp.left.abs()).max(bp.right.abs()).max(bp.value.abs());
        }
        best.max(self.right(0.0).abs()).max(self.left(1.0).abs())
    }

    /// All one-sided values and point values at the ends of the monotone pieces.
    fn piece_ends(&self) -> Vec<f64> {
        let mut pts = self.discontinuity_points();
        if let Kind::Closed(ClosedForm { monotone_knots: Some(k), .. }) = &self.kind {
            pts.extend_from_slice(k);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        let mut out = Vec::with_capacity(3 * pts.len());
        for &p in &pts {
            out.push(self.value(p));
            if p > 0.0 {
                out.push(self.left(p));
            }
            if p < 1.0 {
                out.push(self.right(p));
            }
        }
        out
    }

    /// Total variation on `[0, 1]`.
    ///
    /// Exact for constants, step functions, sampled profiles and piecewise
    /// monotone closed forms. Otherwise partition sums over nested uniform
    /// partitions (64 cells, doubled up to `refinement_limit` times, always
    /// including the breakpoints) must stabilize to a relative change below
    /// 1e-6, or the function is reported as of suspected unbounded variation.
    pub fn total_variation(&self, refinement_limit: u32) -> Result<BVData, RegulatedError> {
        let endpoint_values = (self.value(0.0), self.value(1.0));
        let exact = |v: f64| BVData {
            total_variation_bound: v,
            endpoint_values,
            exact: true,
        };
        match &self.kind {
            Kind::Constant(_) => Ok(exact(0.0)),
            Kind::Step(s) => Ok(exact(s.total_variation())),
            Kind::Sampled(p) => Ok(exact(p.total_variation())),
            Kind::Closed(cf) if cf.monotone_knots.is_some() => Ok(exact(self.monotone_variation())),
            _ => {
                let bound = self.refined_variation(refinement_limit)?;
                Ok(BVData {
                    total_variation_bound: bound,
                    endpoint_values,
                    exact: false,
                })
            }
        }
    }

    fn monotone_variation(&self) -> f64 {
        let mut pts = self.discontinuity_points();
        if let Kind::Closed(ClosedForm { monotone_knots: Some(k), .. }) = &self.kind {
            pts.extend_from_slice(k);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut total = 0.0;
        for (i, &p) in pts.iter().enumerate() {
            let v = self.value(p);
            if p > 0.0 {
                total += (v - self.left(p)).abs();
            }
            if p < 1.0 {
                total += (self.right(p) - v).abs();
                total += (self.left(pts[i + 1]) - self.right(p)).abs();
            }
        }
        total
    }

    fn refined_variation(&self, refinement_limit: u32) -> Result<f64, RegulatedError> {
        let forced: Vec<f64> = self.breakpoints().iter().map(|b| b.at).collect();
        let mut previous = self.partition_sum(INITIAL_PARTITION, &forced);
        for doubling in 1..=refinement_limit {
            let current = self.partition_sum(INITIAL_PARTITION << doubling, &forced);
            let change = (current - previous).abs();
            if change <= VARIATION_STABLE * current.abs().max(f64::MIN_POSITIVE) {
                // The last increment bounds the remaining gap for
                // sums converging at least linearly in the mesh.
                return Ok(current + change);
            }
            previous = current;
        }
        Err(RegulatedError::UnboundedVariation {
            doublings: refinement_limit,
            last_sum: previous,
        })
    }

    fn partition_sum(&self, cells: usize, forced: &[f64]) -> f64 {
        let h = 1.0 / cells as f64;
        let mut total = 0.0;
        let mut prev = self.value(0.0);
        let mut next_forced = forced.iter().peekable();
        for i in 1..=cells {
            let t = if i == cells { 1.0 } else { i as f64 * h };
            while let Some(&&b) = next_forced.peek() {
                if b >= t {
                    break;
                }
                let v = self.value(b);
                total += (v - prev).abs();
                prev = v;
                next_forced.next();
            }
            if next_forced.peek() == Some(&&t) {
                next_forced.next();
            }
            let v = self.value(t);
            total += (v - prev).abs();
            prev = v;
        }
        total
    }

    /// `alpha * self + beta * other`. Step functions stay step functions;
    /// anything else becomes a closed form carrying the union of breakpoints.
    pub fn linear_combination(&self, alpha: f64, other: &RegulatedFn, beta: f64) -> RegulatedFn {
        let name = format!("{alpha}*{} + {beta}*{}", self.name, other.name);
        let as_step = |f: &RegulatedFn| match &f.kind {
            Kind::Step(s) => Some(s.clone()),
            Kind::Constant(c) => Some(StepFn::constant(*c)),
            _ => None,
        };
        if let (Some(a), Some(b)) = (as_step(self), as_step(other)) {
            return RegulatedFn::step(name, a.combine(alpha, &b, beta));
        }
        let (f, g) = (self.clone(), other.clone());
        let mut points: Vec<f64> = self
            .breakpoints()
            .iter()
            .chain(&other.breakpoints())
            .map(|b| b.at)
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mix = move |a: f64, b: f64| alpha * a + beta * b;
        let breakpoints = points
            .iter()
            .map(|&at| Breakpoint {
                at,
                left: mix(self.left(at), other.left(at)),
                right: mix(self.right(at), other.right(at)),
                value: mix(self.value(at), other.value(at)),
            })
            .collect();
        RegulatedFn {
            name,
            kind: Kind::Closed(ClosedForm {
                func: Arc::new(move |t| mix(f.value(t), g.value(t))),
                breakpoints,
                right_at_zero: Some(mix(self.right(0.0), other.right(0.0))),
                left_at_one: Some(mix(self.left(1.0), other.left(1.0))),
                monotone_knots: None,
            }),
            eval_tolerance: alpha.abs() * self.eval_tolerance + beta.abs() * other.eval_tolerance,
        }
    }
}

impl ClosedForm {
    fn find(&self, t: f64) -> Option<&Breakpoint> {
        self.breakpoints
            .binary_search_by(|b| b.at.total_cmp(&t))
            .ok()
            .map(|i| &self.breakpoints[i])
    }
}
