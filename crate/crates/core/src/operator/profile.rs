use std::sync::Arc;

use serde::Serialize;

use crate::regulated::{Grid, Profile};

/// How an iterate is evaluated between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Piecewise linear in the values.
    Linear,
    /// Cubic Hermite using the derivative profile, one-sided at breakpoints.
    Hermite,
}

/// A candidate solution `x` with its derivative `Dx` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    pub x: Profile,
    pub dx: Profile,
    pub dx0: f64,
    pub x0: f64,
    pub interpolation: Interpolation,
}

impl SolutionProfile {
    pub fn zero(grid: Arc<Grid>) -> Self {
        SolutionProfile {
            x: Profile::zeros(Arc::clone(&grid)),
            dx: Profile::zeros(grid),
            dx0: 0.0,
            x0: 0.0,
            interpolation: Interpolation::Hermite,
        }
    }

    /// Values only; evaluated piecewise linearly. `dx` is left at zero.
    pub fn linear(x: Profile) -> Self {
        let x0 = x.values()[0];
        SolutionProfile {
            dx: Profile::zeros(Arc::clone(x.grid())),
            x,
            dx0: 0.0,
            x0,
            interpolation: Interpolation::Linear,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.x.grid()
    }

    /// Sup norm over point values and one-sided values.
    pub fn norm(&self) -> f64 {
        self.x.sup_norm()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let grid = self.grid();
        if let Some(i) = grid.index_of(t) {
            return self.x.values()[i];
        }
        self.eval_in_cell(grid.cell_of(t), t)
    }

    /// Interpolant on cell `[t_i, t_{i+1}]`, using right values at `t_i` and
    /// left values at `t_{i+1}`.
    pub fn eval_in_cell(&self, i: usize, t: f64) -> f64 {
        let pts = self.grid().points();
        let (t0, t1) = (pts[i], pts[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.x.right_at(i), self.x.left_at(i + 1));
        match self.interpolation {
            Interpolation::Linear => y0 + s * (y1 - y0),
            Interpolation::Hermite => {
                let (m0, m1) = (self.dx.right_at(i), self.dx.left_at(i + 1));
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * h * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * h * m1
            }
        }
    }

    /// `alpha * self + beta * other`, componentwise in `x` and `Dx`.
    pub fn combine(&self, alpha: f64, other: &SolutionProfile, beta: f64) -> SolutionProfile {
        SolutionProfile {
            x: self.x.combine(alpha, &other.x, beta),
            dx: self.dx.combine(alpha, &other.dx, beta),
            dx0: alpha * self.dx0 + beta * other.dx0,
            x0: alpha * self.x0 + beta * other.x0,
            interpolation: self.interpolation,
        }
    }

    /// Transfer onto a grid containing this one (same breakpoints), using
    /// the profile's own interpolation for `x` and linear interpolation for `Dx`.
    pub fn resample(&self, grid: Arc<Grid>) -> SolutionProfile {
        let old = self.grid();
        let mut xs = Vec::with_capacity(grid.len());
        let mut dxs = Vec::with_capacity(grid.len());
        for &t in grid.points() {
            match old.index_of(t) {
                Some(i) => {
                    xs.push(self.x.values()[i]);
                    dxs.push(self.dx.values()[i]);
                }
                None => {
                    let i = old.cell_of(t);
                    xs.push(self.eval_in_cell(i, t));
                    let (a, b) = (old.points()[i], old.points()[i + 1]);
                    let w = (t - a) / (b - a);
                    let (d0, d1) = (self.dx.right_at(i), self.dx.left_at(i + 1));
                    dxs.push(d0 + w * (d1 - d0));
                }
            }
        }
        let side = |p: &Profile, t: f64| {
            let i = old.index_of(t).expect("breakpoints are shared");
            (p.left_at(i), p.right_at(i))
        };
        let bps = grid.breakpoints();
        let x_sides = bps.iter().map(|&t| side(&self.x, t)).collect();
        let dx_sides = bps.iter().map(|&t| side(&self.dx, t)).collect();
        SolutionProfile {
            x: Profile::new(Arc::clone(&grid), xs, x_sides).expect("shape matches grid"),
            dx: Profile::new(grid, dxs, dx_sides).expect("shape matches grid"),
            dx0: self.dx0,
            x0: self.x0,
            interpolation: self.interpolation,
        }
    }
}
