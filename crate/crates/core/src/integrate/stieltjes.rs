//! Kurzweil–Henstock–Stieltjes integrals `∫ g du` against regulated integrators.

use crate::regulated::RegulatedFn;

/// Coarsest Riemann–Stieltjes partition per continuous piece.
const INITIAL_CELLS: usize = 16;
/// Finest partition tried before the estimate is returned as is.
const MAX_CELLS: usize = 1 << 20;

/// Division `a = t₀ < … < t_n = b` with a tag in every cell.
///
/// Every forced point inside `(a, b)` is a division point and tags both of
/// its neighbouring cells, and forced endpoints tag their adjacent cell,
/// so jumps of the integrator are charged at the integrand's value there.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition {
    points: Vec<f64>,
    tags: Vec<f64>,
}

impl TaggedPartition {
    /// `n` uniform cells refined at the forced points; free cells are tagged
    /// at their midpoint.
    pub fn forced(a: f64, b: f64, n: usize, forced: &[f64]) -> Self {
        let n = n.max(1);
        let mut points: Vec<f64> = (0..=n)
            .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
            .collect();
        let inside: Vec<f64> = forced.iter().copied().filter(|&t| t > a && t < b).collect();
        points.extend_from_slice(&inside);
        points.sort_by(f64::total_cmp);
        points.dedup();
        let is_forced = |t: f64| forced.contains(&t);
        let tags = points
            .windows(2)
            .map(|w| {
                if is_forced(w[0]) {
                    w[0]
                } else if is_forced(w[1]) {
                    w[1]
                } else {
                    0.5 * (w[0] + w[1])
                }
            })
            .collect();
        TaggedPartition { points, tags }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    /// `Σ g(ξᵢ) (u(tᵢ) - u(tᵢ₋₁))`.
    pub fn stieltjes_sum(&self, g: &RegulatedFn, u: &RegulatedFn) -> f64 {
        self.points
            .windows(2)
            .zip(&self.tags)
            .map(|(w, &tag)| g.value(tag) * (u.value(w[1]) - u.value(w[0])))
            .sum()
    }
}

/// `∫_a^b g du` as jump sum plus continuous part, without any precondition
/// check on `g`. Returns `(value, error estimate)`.
///
/// A jump of `u` at `τ` contributes `g(τ)(u(τ+) - u(τ-))`, with `u(a-)` read
/// as `u(a)` and `u(b+)` as `u(b)`. The continuous part is the limit of
/// midpoint-tagged Riemann–Stieltjes sums on each piece between jumps,
/// refined by doubling until successive sums differ by less than the
/// piece's share of `tol`. Pieces are also cut at the jumps of `g`.
pub(crate) fn jump_and_continuous(
    g: &RegulatedFn,
    u: &RegulatedFn,
    a: f64,
    b: f64,
    tol: f64,
) -> (f64, f64) {
    if a >= b {
        return (0.0, 0.0);
    }
    let jumps: Vec<_> = u
        .breakpoints()
        .into_iter()
        .filter(|bp| bp.at > a && bp.at < b)
        .collect();

    let mut value = g.value(a) * (u.right(a) - u.value(a));
    for bp in &jumps {
        value += g.value(bp.at) * (bp.right - bp.left);
    }
    value += g.value(b) * (u.value(b) - u.left(b));

    let mut error = 0.0;
    if u.has_continuous_part() {
        let mut edges = Vec::with_capacity(jumps.len() + 2);
        edges.push(a);
        edges.extend(jumps.iter().map(|bp| bp.at));
        // g's own jumps: midpoint sums only converge at O(h) across them.
        edges.extend(g.breakpoints().iter().map(|bp| bp.at).filter(|&t| t > a && t < b));
        edges.push(b);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        for w in edges.windows(2) {
            let share = tol * (w[1] - w[0]) / (b - a);
            let (v, e) = continuous_piece(g, u, w[0], w[1], share);
            value += v;
            error += e;
        }
    }
    (value, error)
}

/// `∫ g du_c` over the open piece `(p, q)` on which `u` is continuous.
fn continuous_piece(g: &RegulatedFn, u: &RegulatedFn, p: f64, q: f64, tol: f64) -> (f64, f64) {
    let sum = |n: usize| -> f64 {
        let h = (q - p) / n as f64;
        let mut total = 0.0;
        let mut u_prev = u.right(p);
        for i in 0..n {
            let hi = if i + 1 == n { q } else { p + (i + 1) as f64 * h };
            let u_next = if i + 1 == n { u.left(q) } else { u.value(hi) };
            let tag = p + (i as f64 + 0.5) * h;
            total += g.value(tag) * (u_next - u_prev);
            u_prev = u_next;
        }
        total
    };
    let mut n = INITIAL_CELLS;
    let mut previous = sum(n);
    loop {
        n *= 2;
        let current = sum(n);
        let change = (current - previous).abs();
        if change <= tol || n >= MAX_CELLS {
            return (current, change);
        }
        previous = current;
    }
}
