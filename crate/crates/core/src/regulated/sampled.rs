use std::sync::Arc;

use super::step::check_knots;
use super::Breakpoint;
use crate::error::RegulatedError;

/// Sorted evaluation points on `[0, 1]` with a set of registered breakpoints.
///
/// Always contains 0 and 1. Breakpoints are grid points at which profiles
/// keep separate left and right values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    breaks: Vec<usize>,
}

impl Grid {
    /// `base` uniform points (including both endpoints), plus every point of
    /// `forced` and `breakpoints`.
    pub fn new(base: usize, forced: &[f64], breakpoints: &[f64]) -> Result<Self, RegulatedError> {
        if base < 2 {
            return Err(RegulatedError::Invalid(format!(
                "a grid needs at least 2 base points, got {base}"
            )));
        }
        let step = 1.0 / (base - 1) as f64;
        let mut points: Vec<f64> = (0..base).map(|i| i as f64 * step).collect();
        points[base - 1] = 1.0;
        Self::from_points(points, forced, breakpoints)
    }

    pub fn from_points(
        mut points: Vec<f64>,
        forced: &[f64],
        breakpoints: &[f64],
    ) -> Result<Self, RegulatedError> {
        check_knots(breakpoints)?;
        if forced.iter().chain(&points).any(|t| !(0.0..=1.0).contains(t)) {
            return Err(RegulatedError::Invalid("grid points must lie in [0,1]".into()));
        }
        points.extend_from_slice(forced);
        points.extend_from_slice(breakpoints);
        points.push(0.0);
        points.push(1.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        let breaks = breakpoints
            .iter()
            .map(|b| points.binary_search_by(|p| p.total_cmp(b)).unwrap())
            .collect();
        Ok(Grid { points, breaks })
    }

    /// Same breakpoints, every cell split at its midpoint.
    pub fn refined(&self) -> Grid {
        let mut points = Vec::with_capacity(2 * self.points.len() - 1);
        for w in self.points.windows(2) {
            points.push(w[0]);
            points.push(0.5 * (w[0] + w[1]));
        }
        points.push(1.0);
        let breaks = self.breaks.iter().map(|&i| 2 * i).collect();
        Grid { points, breaks }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid indices of the registered breakpoints, increasing.
    pub fn breakpoint_indices(&self) -> &[usize] {
        &self.breaks
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.breaks.iter().map(|&i| self.points[i]).collect()
    }

    /// Position in the breakpoint list of grid index `i`, if it is one.
    pub fn break_slot(&self, i: usize) -> Option<usize> {
        self.breaks.binary_search(&i).ok()
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.points.binary_search_by(|p| p.total_cmp(&t)).ok()
    }

    /// Cell index `i` with `t_i <= t <= t_{i+1}`.
    pub fn cell_of(&self, t: f64) -> usize {
        let upto = self.points.partition_point(|&p| p <= t);
        upto.saturating_sub(1).min(self.points.len() - 2)
    }
}

/// Values on a [`Grid`], linear between grid points, with one-sided values
/// at the grid's breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Arc<Grid>,
    values: Vec<f64>,
    sides: Vec<(f64, f64)>,
}

impl Profile {
    /// `sides[k]` holds `(left, right)` at the k-th breakpoint of the grid.
    pub fn new(
        grid: Arc<Grid>,
        values: Vec<f64>,
        sides: Vec<(f64, f64)>,
    ) -> Result<Self, RegulatedError> {
        if values.len() != grid.len() || sides.len() != grid.breaks.len() {
            return Err(RegulatedError::Invalid(format!(
                "profile shape mismatch: {} values / {} sides for {} points / {} breakpoints",
                values.len(),
                sides.len(),
                grid.len(),
                grid.breaks.len()
            )));
        }
        Ok(Profile { grid, values, sides })
    }

    /// Profile without jumps: one-sided values equal the point values.
    pub fn continuous(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        let sides = grid.breaks.iter().map(|&i| (values[i], values[i])).collect();
        Profile { grid, values, sides }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self::continuous(grid, vec![0.0; n])
    }

    pub fn sample(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points.iter().map(|&t| f(t)).collect();
        Self::continuous(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sides(&self) -> &[(f64, f64)] {
        &self.sides
    }

    pub fn left_at(&self, i: usize) -> f64 {
        match self.grid.break_slot(i) {
            Some(k) => self.sides[k].0,
            None => self.values[i],
        }
    }

    pub fn right_at(&self, i: usize) -> f64 {
        match self.grid.break_slot(i) {
            Some(k) => self.sides[k].1,
            None => self.values[i],
        }
    }

    pub(crate) fn value(&self, t: f64) -> f64 {
        if let Some(i) = self.grid.index_of(t) {
            return self.values[i];
        }
        self.interpolate(t)
    }

    fn interpolate(&self, t: f64) -> f64 {
        let i = self.grid.cell_of(t);
        let (a, b) = (self.grid.points[i], self.grid.points[i + 1]);
        let w = (t - a) / (b - a);
        let (ya, yb) = (self.right_at(i), self.left_at(i + 1));
        ya + w * (yb - ya)
    }

    pub(crate) fn left(&self, t: f64) -> f64 {
        match self.grid.index_of(t) {
            Some(i) => self.left_at(i),
            None => self.interpolate(t),
        }
    }

    pub(crate) fn right(&self, t: f64) -> f64 {
        match self.grid.index_of(t) {
            Some(i) => self.right_at(i),
            None => self.interpolate(t),
        }
    }

    pub(crate) fn breakpoint_list(&self) -> Vec<Breakpoint> {
        self.grid
            .breaks
            .iter()
            .zip(&self.sides)
            .map(|(&i, &(left, right))| Breakpoint {
                at: self.grid.points[i],
                left,
                right,
                value: self.values[i],
            })
            .collect()
    }

    /// Exact sup norm of the piecewise linear function.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .chain(self.sides.iter().flat_map(|(l, r)| [l, r]))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact total variation of the piecewise linear function.
    pub(crate) fn total_variation(&self) -> f64 {
        let n = self.values.len();
        let mut total = 0.0;
        for i in 0..n - 1 {
            total += (self.left_at(i + 1) - self.right_at(i)).abs();
        }
        for (&i, &(l, r)) in self.grid.breaks.iter().zip(&self.sides) {
            total += (self.values[i] - l).abs() + (r - self.values[i]).abs();
        }
        total
    }

    /// Sup of `|self - other|` over point values and one-sided values.
    pub fn distance(&self, other: &Profile) -> f64 {
        debug_assert!(Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid);
        let pointwise = self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        self.sides
            .iter()
            .zip(&other.sides)
            .fold(pointwise, |m, (a, b)| m.max((a.0 - b.0).abs()).max((a.1 - b.1).abs()))
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Profile, beta: f64) -> Profile {
        let mix = |a: f64, b: f64| alpha * a + beta * b;
        Profile {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| mix(a, b))
                .collect(),
            sides: self
                .sides
                .iter()
                .zip(&other.sides)
                .map(|(a, b)| (mix(a.0, b.0), mix(a.1, b.1)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_forced_points() {
        let g = Grid::new(5, &[0.3], &[0.5, 0.6]).unwrap();
        assert_eq!(g.points(), &[0.0, 0.25, 0.3, 0.5, 0.6, 0.75, 1.0]);
        assert_eq!(g.breakpoint_indices(), &[3, 4]);
        assert_eq!(g.cell_of(0.3), 2);
        assert_eq!(g.cell_of(1.0), 5);
        assert_eq!(g.cell_of(0.0), 0);
    }

    #[test]
    fn refinement_keeps_breakpoints() {
        let g = Grid::new(3, &[], &[0.25]).unwrap();
        let r = g.refined();
        assert_eq!(r.len(), 2 * g.len() - 1);
        assert_eq!(r.breakpoints(), vec![0.25]);
    }

    #[test]
    fn profile_interpolates_with_one_sided_values() {
        let g = Arc::new(Grid::new(3, &[], &[0.25]).unwrap());
        // points 0, 0.25, 0.5, 1
        let p = Profile::new(g, vec![0.0, 1.0, 1.0, 2.0], vec![(0.0, 1.0)]).unwrap();
        assert_eq!(p.value(0.125), 0.0);
        assert_eq!(p.value(0.375), 1.0);
        assert_eq!(p.left(0.25), 0.0);
        assert_eq!(p.right(0.25), 1.0);
        assert_eq!(p.value(0.75), 1.5);
        assert_eq!(p.sup_norm(), 2.0);
        assert_eq!(p.total_variation(), 2.0);
    }
}
