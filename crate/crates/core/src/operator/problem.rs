use std::fmt;
use std::sync::Arc;

use crate::error::ProblemError;
use crate::integrate::Integrand;
use crate::regulated::{Breakpoint, Grid, RegulatedFn};

use super::SolutionProfile;

pub type StateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Right-hand side `f(t, x) = state(t, x) + source(t)`.
///
/// The source carries whatever is singular or oscillatory in `t` alone, so
/// it can be integrated once per grid through its own antiderivative or
/// improper limit instead of at every iteration.
#[derive(Clone)]
pub struct Forcing {
    name: String,
    state: StateFn,
    source: Option<Integrand>,
}

impl Forcing {
    pub fn new(name: impl Into<String>, state: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Forcing {
            name: name.into(),
            state: Arc::new(state),
            source: None,
        }
    }

    pub fn zero() -> Self {
        Forcing::new("zero", |_, _| 0.0)
    }

    /// `f ≡ c`, carried entirely by the source so `F(t) = c t` is exact.
    pub fn constant(c: f64) -> Self {
        Forcing {
            name: if c == 0.0 { "zero".into() } else { format!("const({c})") },
            state: Arc::new(|_, _| 0.0),
            source: Some(Integrand::constant(c)),
        }
    }

    pub fn with_source(mut self, source: Integrand) -> Self {
        self.source = Some(source);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let s = self.source.as_ref().map_or(0.0, |s| s.eval(t));
        (self.state)(t, x) + s
    }

    pub fn state(&self, t: f64, x: f64) -> f64 {
        (self.state)(t, x)
    }

    pub fn source(&self) -> Option<&Integrand> {
        self.source.as_ref()
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Forcing")
            .field("name", &self.name)
            .field("source", &self.source)
            .finish()
    }
}

/// Coefficient `g(t, x)` of the measure term `g(t, x) Du`.
#[derive(Clone)]
pub struct Coupling {
    name: String,
    func: StateFn,
    right_limit_at_zero: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl Coupling {
    pub fn new(name: impl Into<String>, func: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Coupling {
            name: name.into(),
            func: Arc::new(func),
            right_limit_at_zero: None,
        }
    }

    pub fn zero() -> Self {
        Coupling::new("zero", |_, _| 0.0)
    }

    /// `g*(t, x)`: 0 at `t = 0`, 1 on `(0, 1]`, independent of `x`.
    pub fn g_star() -> Self {
        Coupling::new("gstar", |t, _| if t == 0.0 { 0.0 } else { 1.0 }).with_right_limit_at_zero(|_| 1.0)
    }

    /// `lim_{t→0+} g(t, x)` for couplings whose value at 0 is isolated.
    pub fn with_right_limit_at_zero(mut self, limit: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.right_limit_at_zero = Some(Arc::new(limit));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.func)(t, x)
    }

    /// `t ↦ g(t, x(t))` as a regulated function.
    pub fn compose(&self, x: &SolutionProfile) -> RegulatedFn {
        let func = Arc::clone(&self.func);
        let xs = x.clone();
        let mut out = RegulatedFn::closed_form(format!("{}∘x", self.name), move |t| func(t, xs.eval(t)));
        for (&i, &(l, r)) in x.grid().breakpoint_indices().iter().zip(x.x.sides()) {
            let at = x.grid().points()[i];
            let v = x.x.values()[i];
            if l != v || r != v {
                let bp = Breakpoint {
                    at,
                    left: self.eval(at, l),
                    right: self.eval(at, r),
                    value: self.eval(at, v),
                };
                out = out.with_breakpoint(bp).expect("grid breakpoints are valid");
            }
        }
        if let Some(lim) = &self.right_limit_at_zero {
            out = out.with_right_limit_at_zero(lim(x.x.values()[0]));
        }
        out
    }
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coupling").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Envelope data `k`, `h` and the variation bound `M`.
#[derive(Clone, Debug)]
pub struct BoundData {
    pub k: Integrand,
    pub h: Integrand,
    pub m: f64,
}

/// `-D²x = f(t,x) + g(t,x) Du` on `[0,1]` with `x(0) = β Dx(0)` and
/// `Dx(1) + Dx(η) = 0`, plus the envelope data of the existence theory.
#[derive(Clone)]
pub struct ProblemSpec {
    pub f: Forcing,
    pub g: Coupling,
    pub u: RegulatedFn,
    pub beta: f64,
    pub eta: f64,
    pub bounds: BoundData,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("f", &self.f)
            .field("g", &self.g)
            .field("u", &self.u.name())
            .field("beta", &self.beta)
            .field("eta", &self.eta)
            .field("bounds", &self.bounds)
            .finish()
    }
}

/// Sample values of `x` used to check `g(0, x) = 0`.
fn probe_values() -> impl Iterator<Item = f64> {
    (-40..=40).map(|i| i as f64 * 2.5)
}

impl ProblemSpec {
    pub fn new(
        f: Forcing,
        g: Coupling,
        u: RegulatedFn,
        beta: f64,
        eta: f64,
        bounds: BoundData,
    ) -> Result<Self, ProblemError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(ProblemError::Eta(eta));
        }
        if !beta.is_finite() {
            return Err(ProblemError::Beta(beta));
        }
        if !(bounds.m.is_finite() && bounds.m >= 0.0) {
            return Err(ProblemError::VariationBound(bounds.m));
        }
        for x in probe_values() {
            let value = g.eval(0.0, x);
            if value != 0.0 {
                return Err(ProblemError::CouplingAtZero { x, value });
            }
        }
        Ok(ProblemSpec { f, g, u, beta, eta, bounds })
    }

    /// `base` uniform points plus η and every breakpoint of `u`.
    pub fn grid(&self, base: usize) -> Result<Grid, ProblemError> {
        if base < 2 {
            return Err(ProblemError::GridSize(base));
        }
        let breaks: Vec<f64> = self.u.breakpoints().iter().map(|b| b.at).collect();
        Ok(Grid::new(base, &[self.eta], &breaks)?)
    }
}
