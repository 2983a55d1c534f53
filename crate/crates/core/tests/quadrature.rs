use distbvp::catalog;
use distbvp::{hk_integrate, hks_integrate, Integrand, Method, RegulatedFn, StepFn, TaggedPartition};
use proptest::prelude::*;

fn norm_k() -> f64 {
    2.0 / 3.0 * (6f64.sqrt() - 5f64.sqrt())
}

#[test]
fn k41_both_routes() {
    let k = catalog::integrand("k41").unwrap();
    let exact = hk_integrate(&k, 0.0, 1.0, 1e-12).unwrap();
    assert_eq!(exact.method, Method::Antiderivative);
    assert!((exact.value - norm_k()).abs() < 1e-10);
    let numeric = hk_integrate(&k.numeric_only(), 0.0, 1.0, 1e-10).unwrap();
    assert_eq!(numeric.method, Method::Adaptive);
    assert!((numeric.value - norm_k()).abs() < 1e-8);
}

#[test]
fn h42_both_routes() {
    let h = catalog::integrand("h42").unwrap();
    let target = 1.0 + 1f64.sin();
    let exact = hk_integrate(&h, 0.0, 1.0, 1e-12).unwrap();
    assert!((exact.value - target).abs() < 1e-10);
    let limit = hk_integrate(&h.numeric_only(), 0.0, 1.0, 1e-5).unwrap();
    assert_eq!(limit.method, Method::ImproperLimit);
    assert!((limit.value - target).abs() < 1e-5, "{limit:?}");
}

#[test]
fn hks_single_jump_and_telescoping() {
    let g = RegulatedFn::g_star();
    let u = RegulatedFn::heaviside(0.5).unwrap();
    assert_eq!(hks_integrate(&g, &u, 0.0, 1.0, 1e-12).unwrap().value, 1.0);
    let one = RegulatedFn::constant(1.0);
    let w = RegulatedFn::weierstrass(1e-12).unwrap();
    let (a, b) = (0.2, 0.7);
    let v = hks_integrate(&one, &w, a, b, 1e-10).unwrap().value;
    assert!((v - (w.eval(b).unwrap() - w.eval(a).unwrap())).abs() < 1e-12);
    let flat = hks_integrate(&g, &RegulatedFn::constant(3.0), 0.0, 1.0, 1e-12).unwrap();
    assert_eq!(flat.value, 0.0);
}

fn smooth(p: f64, q: f64) -> Integrand {
    Integrand::new("smooth", move |t| (p * t).sin() + q * t * t)
}

fn step(knots: Vec<f64>, levels: Vec<f64>) -> RegulatedFn {
    RegulatedFn::step("step", StepFn::right_continuous(knots, levels).unwrap())
}

fn sorted_knots(raw: Vec<f64>) -> Vec<f64> {
    let mut k: Vec<f64> = raw.into_iter().map(|t| (t * 1e6).round() / 1e6).collect();
    k.sort_by(f64::total_cmp);
    k.dedup();
    k.retain(|&t| t > 0.0 && t < 1.0);
    k
}

fn step_strategy() -> impl Strategy<Value = RegulatedFn> {
    prop::collection::vec(0.01..0.99f64, 1..6).prop_flat_map(|raw| {
        let knots = sorted_knots(raw);
        let n = knots.len() + 1;
        prop::collection::vec(-3.0..3.0f64, n).prop_map(move |levels| step(knots.clone(), levels))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hk_additivity(a in 0.0..0.3f64, b in 0.3..0.6f64, c in 0.6..1.0f64, p in 0.5..8.0f64, q in -2.0..2.0f64) {
        let f = smooth(p, q);
        let ac = hk_integrate(&f, a, c, 1e-11).unwrap();
        let ab = hk_integrate(&f, a, b, 1e-11).unwrap();
        let bc = hk_integrate(&f, b, c, 1e-11).unwrap();
        let slack = ac.error_estimate + ab.error_estimate + bc.error_estimate + 1e-7;
        prop_assert!((ac.value - ab.value - bc.value).abs() <= slack);
    }

    #[test]
    fn hk_additivity_across_the_singular_point(b in 0.05..0.95f64) {
        let h = catalog::integrand("h42").unwrap();
        let whole = hk_integrate(&h, 0.0, 1.0, 1e-12).unwrap().value;
        let parts = hk_integrate(&h, 0.0, b, 1e-12).unwrap().value + hk_integrate(&h, b, 1.0, 1e-12).unwrap().value;
        prop_assert!((whole - parts).abs() < 1e-7);
    }

    #[test]
    fn hk_linearity(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, p in 0.5..6.0f64, q in -2.0..2.0f64) {
        let (f1, f2) = (smooth(p, q), catalog::integrand("numeric(k41)").unwrap());
        let (g1, g2) = (f1.clone(), f2.clone());
        let mix = Integrand::new("mix", move |t| alpha * g1.eval(t) + beta * g2.eval(t));
        let lhs = hk_integrate(&mix, 0.0, 1.0, 1e-11).unwrap().value;
        let rhs = alpha * hk_integrate(&f1, 0.0, 1.0, 1e-11).unwrap().value
            + beta * hk_integrate(&f2, 0.0, 1.0, 1e-11).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-7);
    }

    #[test]
    fn hks_linearity(g1 in step_strategy(), g2 in step_strategy(), u in step_strategy(),
                     alpha in -3.0..3.0f64, beta in -3.0..3.0f64, smooth_u in any::<bool>()) {
        let u = if smooth_u { RegulatedFn::closed_form("sq", |t| t * t).monotone_between(vec![]).unwrap() } else { u };
        let mix = g1.linear_combination(alpha, &g2, beta);
        let lhs = hks_integrate(&mix, &u, 0.0, 1.0, 1e-10).unwrap().value;
        let rhs = alpha * hks_integrate(&g1, &u, 0.0, 1.0, 1e-10).unwrap().value
            + beta * hks_integrate(&g2, &u, 0.0, 1.0, 1e-10).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
    }

    #[test]
    fn holder_type_bound(g in step_strategy(), u in step_strategy(), t in 0.0..1.0f64, use_w in any::<bool>()) {
        let (g, u) = if use_w {
            (RegulatedFn::g_star(), RegulatedFn::weierstrass(1e-12).unwrap())
        } else {
            (g, u)
        };
        let value = hks_integrate(&g, &u, 0.0, t, 1e-10).unwrap().value;
        let var = g.total_variation(16).unwrap().total_variation_bound;
        let bounds = u.sup_norm_bounds(10_000);
        let norm_u = bounds.upper.unwrap_or(bounds.lower);
        let bound = (g.eval(0.0).unwrap().abs() + g.eval(1.0).unwrap().abs() + var) * norm_u;
        prop_assert!(value.abs() <= bound + 1e-12, "{value} > {bound}");
    }

    #[test]
    fn step_integrators_give_the_jump_sum(g in step_strategy(), u in step_strategy()) {
        let exact: f64 = u.breakpoints().iter().map(|bp| g.eval(bp.at).unwrap() * bp.jump()).sum();
        let v = hks_integrate(&g, &u, 0.0, 1.0, 1e-12).unwrap().value;
        prop_assert_eq!(v, exact);
        let knots: Vec<f64> = u.breakpoints().iter().chain(g.breakpoints().iter()).map(|b| b.at).collect();
        let tagged = TaggedPartition::forced(0.0, 1.0, 7, &knots).stieltjes_sum(&g, &u);
        prop_assert!((tagged - exact).abs() < 1e-12);
    }

    #[test]
    fn fubini_type_identity(t in 0.05..1.0f64, p in 0.5..6.0f64, q in -2.0..2.0f64) {
        let f = smooth(p, q);
        let weighted = {
            let f = f.clone();
            Integrand::new("weighted", move |s| (t - s) * f.eval(s))
        };
        let lhs = hk_integrate(&weighted, 0.0, t, 1e-12).unwrap().value;
        let inner = {
            let f = f.clone();
            Integrand::new("F", move |s| hk_integrate(&f, 0.0, s, 1e-13).unwrap().value)
        };
        let rhs = hk_integrate(&inner, 0.0, t, 1e-11).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-7);
    }
}
