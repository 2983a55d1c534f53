//! Improper limits `lim_{ε→0+} ∫_{s+ε}^{b} f` at a registered singular point.
//!
//! For an integrand such as `2t sin(t⁻²) - (2/t) cos(t⁻²)`, which is not
//! Lebesgue integrable near 0, the Kurzweil–Henstock integral equals this
//! limit. The tail integrals are accumulated over the geometric sequence
//! `ε_k = 0.1 · (b - a) · 2⁻ᵏ` and extrapolated by three-point Richardson
//! elimination of the `ε` and `ε²` terms.

use super::kronrod::{adaptive, DEFAULT_MAX_PANELS};
use super::{IntegralResult, Method};
use crate::error::IntegrateError;

/// Largest k in the ε-sequence.
pub const MAX_LEVEL: u32 = 40;

/// Which end of `[a, b]` carries the singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnd {
    Left,
    Right,
}

pub fn improper_limit(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    end: SingularEnd,
    tol: f64,
) -> Result<IntegralResult, IntegrateError> {
    let width = b - a;
    let eps = |k: u32| 0.1 * width * 0.5f64.powi(k as i32);
    // Interval between the singular point and a given offset, oriented away from it.
    let piece = |near: f64, far: f64| match end {
        SingularEnd::Left => (a + near, a + far),
        SingularEnd::Right => (b - far, b - near),
    };
    let segment_tol = 1e-2 * tol;

    let mut quad_error = 0.0;
    // A segment that cannot be integrated ends the sequence.
    let mut integrate = |lo: f64, hi: f64| -> Option<f64> {
        let r = adaptive(f, lo, hi, segment_tol, DEFAULT_MAX_PANELS);
        if !r.converged || !r.value.is_finite() {
            return None;
        }
        quad_error += r.error;
        Some(r.value)
    };

    let (lo, hi) = piece(eps(0), width);
    let Some(first) = integrate(lo, hi) else {
        return Err(IntegrateError::NonConvergence { value: f64::NAN, error: f64::INFINITY, tol });
    };
    let mut partial = vec![first];
    let mut extrapolated: Vec<f64> = Vec::new();
    for k in 1..=MAX_LEVEL {
        let (lo, hi) = piece(eps(k), eps(k - 1));
        if lo >= hi {
            break;
        }
        let Some(segment) = integrate(lo, hi) else { break };
        partial.push(partial[k as usize - 1] + segment);
        if k < 2 {
            continue;
        }
        let i = k as usize;
        let r = (8.0 * partial[i] - 6.0 * partial[i - 1] + partial[i - 2]) / 3.0;
        if let Some(&prev) = extrapolated.last() {
            let change = (r - prev).abs();
            if change < tol {
                return Ok(IntegralResult {
                    value: r,
                    error_estimate: change + quad_error,
                    method: Method::ImproperLimit,
                });
            }
        }
        extrapolated.push(r);
    }
    let (value, error) = match extrapolated.as_slice() {
        [.., a, b] => (*b, (b - a).abs()),
        [b] => (*b, f64::INFINITY),
        [] => (partial[partial.len() - 1], f64::INFINITY),
    };
    Err(IntegrateError::NonConvergence { value, error, tol })
}
