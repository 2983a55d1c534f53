use serde::Serialize;

use super::Breakpoint;
use crate::error::RegulatedError;

/// Piecewise constant function on `[0, 1]`.
///
/// `levels[i]` is the value on the open interval between consecutive knots
/// (with 0 and 1 as outer knots). Values at the knots and at the endpoints
/// are stored separately, so left-, right- and non-continuous jumps are all
/// representable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFn {
    knots: Vec<f64>,
    levels: Vec<f64>,
    at_knots: Vec<f64>,
    at_zero: f64,
    at_one: f64,
}

impl StepFn {
    /// Right-continuous step function: `levels[i]` holds on `[knots[i-1], knots[i])`,
    /// the last level also at `t = 1`.
    pub fn right_continuous(knots: Vec<f64>, levels: Vec<f64>) -> Result<Self, RegulatedError> {
        check_knots(&knots)?;
        if levels.len() != knots.len() + 1 {
            return Err(RegulatedError::Invalid(format!(
                "{} knots need {} levels, got {}",
                knots.len(),
                knots.len() + 1,
                levels.len()
            )));
        }
        if levels.iter().any(|v| !v.is_finite()) {
            return Err(RegulatedError::Invalid("non-finite level".into()));
        }
        let at_knots = levels[1..].to_vec();
        Ok(StepFn {
            at_zero: levels[0],
            at_one: *levels.last().unwrap(),
            knots,
            levels,
            at_knots,
        })
    }

    /// `H(t - center)`, right-continuous at the jump.
    pub fn heaviside(center: f64) -> Result<Self, RegulatedError> {
        if !(center > 0.0 && center < 1.0) {
            return Err(RegulatedError::Breakpoints(format!(
                "heaviside center {center} must lie in (0,1)"
            )));
        }
        Self::right_continuous(vec![center], vec![0.0, 1.0])
    }

    /// 0 at `t = 0` and 1 on `(0, 1]`.
    pub fn g_star() -> Self {
        StepFn {
            knots: Vec::new(),
            levels: vec![1.0],
            at_knots: Vec::new(),
            at_zero: 0.0,
            at_one: 1.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        StepFn {
            knots: Vec::new(),
            levels: vec![c],
            at_knots: Vec::new(),
            at_zero: c,
            at_one: c,
        }
    }

    /// Overrides the value at a single point (a knot or an endpoint).
    pub fn with_value_at(mut self, t: f64, value: f64) -> Result<Self, RegulatedError> {
        if t == 0.0 {
            self.at_zero = value;
        } else if t == 1.0 {
            self.at_one = value;
        } else if let Ok(i) = self.knot_index(t) {
            self.at_knots[i] = value;
        } else {
            return Err(RegulatedError::Breakpoints(format!(
                "{t} is neither a knot nor an endpoint"
            )));
        }
        Ok(self)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    fn knot_index(&self, t: f64) -> Result<usize, usize> {
        self.knots.binary_search_by(|k| k.total_cmp(&t))
    }

    pub(crate) fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.at_zero;
        }
        if t == 1.0 {
            return self.at_one;
        }
        match self.knot_index(t) {
            Ok(i) => self.at_knots[i],
            Err(i) => self.levels[i],
        }
    }

    pub(crate) fn left(&self, t: f64) -> f64 {
        let below = self.knots.partition_point(|&k| k < t);
        self.levels[below]
    }

    pub(crate) fn right(&self, t: f64) -> f64 {
        let upto = self.knots.partition_point(|&k| k <= t);
        self.levels[upto]
    }

    pub(crate) fn breakpoints(&self) -> Vec<Breakpoint> {
        self.knots
            .iter()
            .enumerate()
            .map(|(i, &at)| Breakpoint {
                at,
                left: self.levels[i],
                right: self.levels[i + 1],
                value: self.at_knots[i],
            })
            .collect()
    }

    pub(crate) fn sup_norm(&self) -> f64 {
        self.levels
            .iter()
            .chain(&self.at_knots)
            .chain([&self.at_zero, &self.at_one])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact variation: the sum of every jump, including the deviation of the
    /// point values from the neighbouring levels.
    pub(crate) fn total_variation(&self) -> f64 {
        let mut total = (self.levels[0] - self.at_zero).abs();
        for (i, &v) in self.at_knots.iter().enumerate() {
            total += (v - self.levels[i]).abs() + (self.levels[i + 1] - v).abs();
        }
        total + (self.at_one - self.levels[self.levels.len() - 1]).abs()
    }

    /// `alpha * self + beta * other` on the merged knot set.
    pub fn combine(&self, alpha: f64, other: &StepFn, beta: f64) -> StepFn {
        let mut knots: Vec<f64> = self.knots.iter().chain(&other.knots).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mix = |a: f64, b: f64| alpha * a + beta * b;
        let mut levels = Vec::with_capacity(knots.len() + 1);
        // Level on each gap, read at an interior point of the gap.
        let mut prev = 0.0;
        for &k in knots.iter().chain([&1.0]) {
            let mid = 0.5 * (prev + k);
            levels.push(mix(self.value(mid), other.value(mid)));
            prev = k;
        }
        let at_knots = knots
            .iter()
            .map(|&k| mix(self.value(k), other.value(k)))
            .collect();
        StepFn {
            at_zero: mix(self.at_zero, other.at_zero),
            at_one: mix(self.at_one, other.at_one),
            knots,
            levels,
            at_knots,
        }
    }
}

pub(crate) fn check_knots(knots: &[f64]) -> Result<(), RegulatedError> {
    if knots.iter().any(|&k| !(k > 0.0 && k < 1.0)) {
        return Err(RegulatedError::Breakpoints(
            "breakpoints must lie in the open interval (0,1)".into(),
        ));
    }
    if knots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RegulatedError::Breakpoints(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}
