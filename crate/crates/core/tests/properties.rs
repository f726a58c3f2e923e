use jn_bellman::bellman::{bellman_derivatives, bellman_value, quadratic_form, Sign};
use jn_bellman::constants::{c_dyadic, conjectured_nd, delta_root, ExtendedValue};
use jn_bellman::domain::{split_interval, vertical_gap, BellmanPoint};
use jn_bellman::extremal::{continuous_extremal, dyadic_extremal, perspective2_digits, ExtremalParams};
use jn_bellman::piecewise::{
    bmo_norm_dyadic, dyadic_digits, DyadicStepFunction, Moments, PiecewiseFunction, Segment, Shape,
};
use jn_bellman::verify::midpoint_gap;
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

/// `(ε, p)` with `p ∈ Ω_ε`; the variance fraction hits both boundaries.
fn eps_point(eps: std::ops::Range<f64>) -> impl Strategy<Value = (f64, BellmanPoint)> {
    let frac = prop_oneof![Just(0.0), Just(1.0), 0.0..1.0];
    (eps, -1.5..1.5f64, frac).prop_map(|(e, x1, f)| (e, BellmanPoint::from_mean_variance(x1, f * e * e).unwrap()))
}

fn ramp() -> impl Strategy<Value = (f64, PiecewiseFunction)> {
    (0.05..1.5f64, any::<bool>(), 0.01..=1.0f64, -1.0..1.0f64).prop_map(|(eps, pos, a, b)| {
        let gamma = if pos { eps } else { -eps };
        let mut segs = vec![Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma, a, b } }];
        if a < 1.0 {
            segs.push(Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: b } });
        }
        (eps, PiecewiseFunction::new(segs).unwrap())
    })
}

fn leaves(depth: u32) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1usize << depth)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bellman_ordering((delta, p) in eps_point(0.05..0.95)) {
        let lo = p.x1().exp();
        let bp = bellman_value(p, delta, Sign::Plus).unwrap().to_f64();
        let bm = bellman_value(p, delta, Sign::Minus).unwrap().to_f64();
        prop_assert!(bm >= lo * (1.0 - 1e-14));
        prop_assert!(bp >= bm * (1.0 - 1e-14));
        if p.variance() == 0.0 {
            prop_assert!(close(bp, lo, 1e-14) && close(bm, lo, 1e-14));
        }
    }

    #[test]
    fn quadratic_form_nonnegative_and_degenerate(
        (delta, p) in eps_point(0.05..0.95),
        s in sign(),
        d in prop::array::uniform2(-1.0..1.0f64),
    ) {
        prop_assume!(vertical_gap(p, delta).unwrap() > 1e-6);
        prop_assert!(quadratic_form(p, d, delta, s).unwrap() >= -1e-12);
        let der = bellman_derivatives(p, delta, s).unwrap();
        let h = der.hess;
        let scale = (h[0][0] * h[1][1]).abs() + h[0][1] * h[0][1];
        prop_assert!(der.hessian_det().abs() <= 1e-8 * scale);
    }

    /// The midpoint gap in reduced coordinates equals the Bellman midpoint
    /// defect after the translation and scaling that remove `x₁⁰`.
    #[test]
    fn reduction_identity(
        (eps, xm) in eps_point(0.1..0.9),
        dx in -1.0..1.0f64,
        f in 0.0..=1.0f64,
        s in sign(),
    ) {
        let xp = BellmanPoint::from_mean_variance(xm.x1() + 2.0 * eps * dx, f * eps * eps).unwrap();
        let theta = 0.5 * (xp.x1() - xm.x1());
        let v0 = 0.5 * (xm.variance() + xp.variance()) + theta * theta;
        prop_assume!(v0 <= eps * eps);
        let mid = BellmanPoint::from_mean_variance(xm.x1() + theta, v0).unwrap();
        let delta = delta_root(eps, s).unwrap().root;
        let b = |x| bellman_value(x, delta, s).unwrap().to_f64();
        let gap = |x| vertical_gap(x, delta).unwrap();
        let k = s.factor();
        let defect = (2.0 * b(mid) - b(xm) - b(xp)) * (1.0 - k * delta) * (k * delta - mid.x1()).exp();
        let reduced = midpoint_gap(gap(mid), gap(xm), gap(xp), theta, s);
        prop_assert!((defect - reduced).abs() <= 1e-10 * (1.0 + reduced.abs()));
        prop_assert!(k * defect >= -1e-10);
    }

    #[test]
    fn digits_reconstruct_alpha(alpha in 0.0..1.0f64) {
        let d = dyadic_digits(alpha, 40).unwrap();
        let sum: f64 = d.iter().enumerate().map(|(k, &b)| b as f64 * 0.5f64.powi(k as i32 + 1)).sum();
        prop_assert!(sum <= alpha && alpha - sum < 0.5f64.powi(40));
    }

    #[test]
    fn perspective2_matches_binary((eps, p) in eps_point(0.1..0.9), s in sign()) {
        prop_assume!(p.variance() < eps * eps * (1.0 - 1e-9));
        let delta = delta_root(eps, s).unwrap().root;
        let params = ExtremalParams::new(p, eps, delta).unwrap();
        let geo = perspective2_digits(p, eps, delta, 20).unwrap();
        prop_assert_eq!(geo, dyadic_digits(params.alpha, 20).unwrap());
    }

    #[test]
    fn piecewise_moments_are_additive((_, phi) in ramp(), c in 0.0..0.3f64, d in 0.35..0.65f64, e in 0.7..=1.0f64) {
        let (l, r, w) = (phi.moments(c, d).unwrap(), phi.moments(d, e).unwrap(), phi.moments(c, e).unwrap());
        let (a, b) = ((d - c) / (e - c), (e - d) / (e - c));
        prop_assert!(close(w.mean, a * l.mean + b * r.mean, 1e-12));
        prop_assert!(close(w.second(), a * l.second() + b * r.second(), 1e-11));
        prop_assert!(close(w.exp_mean.to_f64(), a * l.exp_mean.to_f64() + b * r.exp_mean.to_f64(), 1e-12));
    }

    #[test]
    fn dyadic_children_combine(v in leaves(4), n in 0u32..4) {
        let f = DyadicStepFunction::from_leaves(&v).unwrap();
        let parent = f.level_moments(n).unwrap();
        let child = f.level_moments(n + 1).unwrap();
        for (m, pair) in parent.iter().zip(child.chunks(2)) {
            let (l, r) = (pair[0], pair[1]);
            prop_assert!(close(m.mean, 0.5 * (l.mean + r.mean), 1e-13));
            let dm = l.mean - r.mean;
            prop_assert!(close(m.variance, 0.5 * (l.variance + r.variance) + 0.25 * dm * dm, 1e-12));
            prop_assert!(close(m.exp_mean.to_f64(), 0.5 * (l.exp_mean.to_f64() + r.exp_mean.to_f64()), 1e-13));
        }
    }

    #[test]
    fn dyadic_norm_scales(v in leaves(3), k in 0.1..3.0f64, shift in -1.0..1.0f64) {
        let f = DyadicStepFunction::from_leaves(&v).unwrap();
        let g = f.affine(shift, k);
        prop_assert!(close(bmo_norm_dyadic(&g, 8), k * bmo_norm_dyadic(&f, 8), 1e-12));
    }

    #[test]
    fn split_invariants((eps, phi) in ramp(), ratio in prop_oneof![Just(1.02), Just(1.1), Just(1.5), Just(2.0)]) {
        let eps1 = ratio * eps;
        let s = split_interval(&phi, eps, eps1).unwrap();
        let a = s.alpha_plus;
        prop_assert!(a > 0.0 && a < 1.0);
        let whole = phi.moments(0.0, 1.0).unwrap();
        let left = phi.moments(0.0, 1.0 - a).unwrap();
        prop_assert!(close(s.x0.x1(), whole.mean, 1e-10) && close(s.x0.x2(), whole.second(), 1e-10));
        prop_assert!(close(s.x_minus.x1(), left.mean, 1e-10) && close(s.x_minus.x2(), left.second(), 1e-10));
        prop_assert!(close(s.x0.x1(), (1.0 - a) * s.x_minus.x1() + a * s.x_plus.x1(), 1e-10));
        prop_assert!(close(s.x0.x2(), (1.0 - a) * s.x_minus.x2() + a * s.x_plus.x2(), 1e-10));
        prop_assert!(s.rho_value <= eps1 * eps1 + 1e-9);
        if s.tangency {
            prop_assert!(a.min(1.0 - a) >= (1.0 - 1.0 / (ratio * ratio)).sqrt() - 1e-9);
        } else {
            prop_assert_eq!(a, 0.5);
        }
    }

    #[test]
    fn continuous_extremal_hits_point((eps, p) in eps_point(0.05..0.95), s in sign()) {
        let phi = continuous_extremal(p, eps, s).unwrap();
        let m = phi.moments(0.0, 1.0).unwrap();
        prop_assert!(close(m.mean, p.x1(), 1e-12) && close(m.second(), p.x2(), 1e-12));
        prop_assert!(close(m.exp_mean.to_f64(), bellman_value(p, eps, s).unwrap().to_f64(), 1e-12));
    }

    #[test]
    fn dyadic_extremal_hits_point((eps, p) in eps_point(0.05..0.95), s in sign()) {
        let ex = dyadic_extremal(p, eps, s, 45).unwrap();
        let m = ex.function.moments(0.0, 1.0).unwrap();
        prop_assert!(close(m.mean, p.x1(), 1e-10) && close(m.second(), p.x2(), 1e-10));
        let b = bellman_value(p, ex.delta, s).unwrap().to_f64();
        prop_assert!(close(m.exp_mean.to_f64(), b, 1e-10));
        prop_assert!(bmo_norm_dyadic(&ex.function, u32::MAX) <= eps * (1.0 + 1e-12));
    }

    #[test]
    fn conjecture_reduces_at_n1(eps in 0.02..0.97f64) {
        let c = conjectured_nd(eps, 1).unwrap();
        prop_assert!(!c.conjectural);
        prop_assert!(close(c.c_nd.to_f64(), c_dyadic(eps).unwrap().to_f64(), 1e-10));
    }

    #[test]
    fn serde_round_trips((eps, p) in eps_point(0.05..0.9), s in sign(), v in leaves(3), (_, phi) in ramp()) {
        let ex = dyadic_extremal(p, eps, s, 12).unwrap();
        let json = serde_json::to_string(&ex).unwrap();
        prop_assert_eq!(serde_json::from_str::<jn_bellman::extremal::DyadicExtremal>(&json).unwrap(), ex);
        let f = DyadicStepFunction::from_leaves(&v).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<DyadicStepFunction>(&json).unwrap(), f);
        let json = serde_json::to_string(&phi).unwrap();
        prop_assert_eq!(serde_json::from_str::<PiecewiseFunction>(&json).unwrap(), phi);
        let c = conjectured_nd(eps, 2).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<jn_bellman::constants::ConjecturedConstants>(&json).unwrap(), c);
        for x in [ExtendedValue::Infinite, ExtendedValue::Finite(eps)] {
            let json = serde_json::to_string(&x).unwrap();
            prop_assert_eq!(serde_json::from_str::<ExtendedValue>(&json).unwrap(), x);
        }
    }
}
