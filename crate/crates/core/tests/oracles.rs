//! Independent oracles: quadrature, explicit sums, sign scans and brute
//! force, checked against the closed forms. Frozen values at the end.

use approx::assert_relative_eq;
use jn_bellman::bellman::{bellman_value, w_profile, Sign};
use jn_bellman::constants::{c_continuous, c_dyadic, delta_root, eps0_dyadic, g_function};
use jn_bellman::domain::BellmanPoint;
use jn_bellman::extremal::dyadic_extremal;
use jn_bellman::piecewise::{
    bmo_norm_continuous, bmo_norm_dyadic, DyadicStepFunction, Moments, PiecewiseFunction, Segment, Shape,
};

/// Composite Simpson on `(lo, hi]` with `t = lo + (hi-lo)·s^m`, which tames
/// a `t^{-γ}` singularity at 0 once `m(1-γ) ≥ 4`.
fn quad(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: i32) -> f64 {
    let n = 20_000;
    let g = |s: f64| {
        let t = lo + (hi - lo) * s.powi(m);
        if s == 0.0 {
            0.0
        } else {
            f(t) * m as f64 * (hi - lo) * s.powi(m - 1)
        }
    };
    let h = 1.0 / n as f64;
    let mut acc = g(0.0) + g(1.0);
    for i in 1..n {
        acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn ramp(gamma: f64, a: f64, b: f64) -> PiecewiseFunction {
    let mut segs = vec![Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma, a, b } }];
    if a < 1.0 {
        segs.push(Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: b } });
    }
    PiecewiseFunction::new(segs).unwrap()
}

#[test]
fn ramp_moments_match_quadrature() {
    for &(gamma, a, b) in &[(0.5, 0.3, 0.1), (-0.7, 1.0, -0.4), (0.9, 0.05, 2.0), (-0.2, 0.6, 0.0)] {
        let phi = ramp(gamma, a, b);
        let f = |t: f64| phi.eval(t).unwrap();
        for &(lo, hi) in &[(0.0, 1.0), (0.0, 0.5 * a), (0.25 * a, 0.9), (0.5 * a, a)] {
            let len = hi - lo;
            // Integrate each smooth piece separately.
            let cut = a.clamp(lo, hi);
            let m = (4.0 / (1.0 - gamma.max(0.0))).ceil() as i32;
            let q = |h: &dyn Fn(f64) -> f64| (quad(h, lo, cut, m) + quad(h, cut, hi, 4)) / len;
            let mean = q(&|t| f(t));
            let second = q(&|t| f(t) * f(t));
            let em = q(&|t| f(t).exp());
            let m = phi.moments(lo, hi).unwrap();
            assert_relative_eq!(m.mean, mean, epsilon = 1e-9, max_relative = 1e-8);
            assert_relative_eq!(m.second(), second, epsilon = 1e-9, max_relative = 1e-8);
            assert_relative_eq!(m.exp_mean.to_f64(), em, max_relative = 1e-8);
        }
    }
}

#[test]
fn continuous_norm_against_brute_force() {
    let phi = ramp(0.4, 0.35, -0.2);
    let mut best = 0.0f64;
    for i in 0..60 {
        for j in i + 1..=60 {
            let (c, d) = (i as f64 / 60.0, j as f64 / 60.0);
            best = best.max(phi.moments(c, d).unwrap().variance);
        }
    }
    let norm = bmo_norm_continuous(&phi).unwrap();
    assert!(best.sqrt() <= norm + 1e-12);
    assert_relative_eq!(norm, 0.4, max_relative = 1e-6);
}

#[test]
fn staircase_matches_partial_sums() {
    for &(f, d) in &[(0.0, 0.3), (-1.0, 0.5), (0.7, -0.4), (0.2, 0.65)] {
        let s = DyadicStepFunction::staircase(f, d).unwrap();
        let (mut m1, mut m2, mut me) = (0.0, 0.0, 0.0);
        let mut term = 0.5 * f.exp();
        for k in 0..2000 {
            let w = 0.5f64.powi(k + 1);
            let v = f + k as f64 * d;
            m1 += w * v;
            m2 += w * v * v;
            me += term;
            term *= 0.5 * d.exp();
        }
        let m = s.moments(0.0, 1.0).unwrap();
        assert_relative_eq!(m.mean, m1, epsilon = 1e-13);
        assert_relative_eq!(m.second(), m2, epsilon = 1e-12, max_relative = 1e-13);
        assert_relative_eq!(m.exp_mean.to_f64(), me, max_relative = 1e-13);
        assert_relative_eq!(m.variance, 2.0 * d * d, epsilon = 1e-13);
    }
}

#[test]
fn dyadic_norm_against_brute_force() {
    let leaves = [0.3, -0.1, 0.8, 0.8, -0.5, 0.0, 0.25, 0.1];
    let f = DyadicStepFunction::from_leaves(&leaves).unwrap();
    let mut best = 0.0f64;
    for level in 0..3 {
        let w = leaves.len() >> level;
        for block in leaves.chunks(w) {
            let m = block.iter().sum::<f64>() / w as f64;
            let v = block.iter().map(|x| x * x).sum::<f64>() / w as f64 - m * m;
            best = best.max(v);
        }
    }
    assert_relative_eq!(bmo_norm_dyadic(&f, 3), best.sqrt(), max_relative = 1e-12);
}

#[test]
fn bellman_value_matches_direct_formula() {
    for sign in [Sign::Plus, Sign::Minus] {
        let s = sign.factor();
        for &(x1, var, delta) in &[(0.0f64, 0.1f64, 0.5f64), (0.7, 0.0, 0.3), (-1.2, 0.64, 0.8), (0.3, 0.2, 0.9)] {
            let g: f64 = (delta * delta - var).sqrt();
            let want = (1.0 - s * g) / (1.0 - s * delta) * (x1 + s * g - s * delta).exp();
            let p = BellmanPoint::from_mean_variance(x1, var).unwrap();
            let got = bellman_value(p, delta, sign).unwrap().to_f64();
            assert_relative_eq!(got, want, max_relative = 1e-13);
            let w = w_profile(var, delta, sign).unwrap();
            assert_relative_eq!(x1 + w, want.ln(), epsilon = 1e-13);
        }
    }
}

/// The profile solves `w' = ½(1 ∓ ...)`: check `w(t) = ∫₀ᵗ w'` by
/// quadrature of a central-difference derivative.
#[test]
fn profile_is_an_integral_of_its_derivative() {
    for sign in [Sign::Plus, Sign::Minus] {
        let delta = 0.6;
        let t = 0.3;
        let h = 1e-6;
        let dw = |s: f64| {
            let lo = (s - h).max(0.0);
            (w_profile(s + h, delta, sign).unwrap() - w_profile(lo, delta, sign).unwrap()) / (s + h - lo)
        };
        let mut acc = 0.0;
        let n = 2000;
        for i in 0..n {
            let s = (i as f64 + 0.5) * t / n as f64;
            acc += dw(s) * t / n as f64;
        }
        assert_relative_eq!(acc, w_profile(t, delta, sign).unwrap(), epsilon = 1e-7);
    }
}

/// Roots found by an independent scan for a sign change plus bisection.
fn scan_root(eps: f64, sign: Sign, hi: f64) -> f64 {
    let g = |d: f64| g_function(d, eps, sign).unwrap();
    let n = 1000;
    let mut prev = eps + (hi - eps) * 1e-9;
    for i in 1..=n {
        let x = eps + (hi - eps) * i as f64 / n as f64;
        if g(prev).signum() != g(x).signum() {
            let (mut a, mut b) = (prev, x);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if g(m).signum() == g(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev = x;
    }
    panic!("no sign change for eps={eps}");
}

#[test]
fn delta_roots_match_sign_scan() {
    for i in 1..20 {
        let eps = 0.05 * i as f64;
        let cap = 3.0 * eps / (2.0 * std::f64::consts::SQRT_2);
        if eps < eps0_dyadic() {
            let r = delta_root(eps, Sign::Plus).unwrap().root;
            assert_relative_eq!(r, scan_root(eps, Sign::Plus, 1.0), epsilon = 1e-12);
        }
        let r = delta_root(eps, Sign::Minus).unwrap().root;
        assert_relative_eq!(r, scan_root(eps, Sign::Minus, cap), epsilon = 1e-12);
    }
}

#[test]
fn dyadic_extremal_moments_match_explicit_leaves() {
    // Averages of a depth-40 extremal over the first 2^10 dyadic intervals
    // recombine to the point it was built for.
    let eps = 0.45;
    let p = BellmanPoint::from_mean_variance(0.2, 0.7 * eps * eps).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let ex = dyadic_extremal(p, eps, sign, 40).unwrap();
        let level = ex.function.level_moments(10).unwrap();
        let n = level.len() as f64;
        let m1: f64 = level.iter().map(|m| m.mean).sum::<f64>() / n;
        let m2: f64 = level.iter().map(|m| m.second()).sum::<f64>() / n;
        let me: f64 = level.iter().map(|m| m.exp_mean.to_f64()).sum::<f64>() / n;
        assert_relative_eq!(m1, p.x1(), epsilon = 1e-12);
        assert_relative_eq!(m2, p.x2(), epsilon = 1e-12);
        let b = bellman_value(p, ex.delta, sign).unwrap().to_f64();
        assert_relative_eq!(me, b, max_relative = 1e-10);
    }
}

#[test]
fn frozen_values() {
    assert_relative_eq!(c_continuous(0.5).unwrap().to_f64(), 1.21306131942527, max_relative = 1e-13);
    assert_relative_eq!(c_dyadic(0.5).unwrap().to_f64(), 1.21932921051448, max_relative = 1e-13);
    assert_relative_eq!(delta_root(0.5, Sign::Plus).unwrap().root, 0.510774769355554, epsilon = 1e-13);
    assert_relative_eq!(delta_root(0.5, Sign::Minus).unwrap().root, 0.512268983770355, epsilon = 1e-13);
    assert_relative_eq!(eps0_dyadic(), 0.980258143468547, epsilon = 1e-14);
}
