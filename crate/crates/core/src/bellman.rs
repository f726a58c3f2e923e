//! The Bellman functions `B±_δ` on the strip `Ω_δ`.
//!
//! With `g = √(δ² + x₁² - x₂)`,
//!
//! ```text
//! B±_δ(x) = (1 ∓ g)/(1 ∓ δ) · exp(x₁ ± g ∓ δ) = exp(x₁ + w±(x₂ - x₁²))
//! ```
//!
//! `B+` bounds `⟨e^φ⟩` from above and `B-` bounds `⟨e^{-φ}⟩`-type averages from
//! below. Each is linear along the tangent segments to the upper parabola
//! `x₂ = x₁² + δ²`, which is where its Hessian degenerates.

use serde::{Deserialize, Serialize};

use crate::constants::ExtendedValue;
use crate::domain::{vertical_gap, BellmanPoint};
use crate::error::{Error, Result};

/// Which of the two Bellman functions (upper or lower) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1.0` or `-1.0`.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

/// Gaps below this are treated as the upper boundary, where the second
/// derivatives blow up.
pub const BOUNDARY_GAP_TOL: f64 = 1e-10;

fn check_delta(delta: f64, sign: Sign, allow_large_plus: bool) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive and finite, got {delta}")));
    }
    if sign == Sign::Plus && delta >= 1.0 && !allow_large_plus {
        return Err(Error::Parameter(format!("the plus profile needs delta < 1, got {delta}")));
    }
    Ok(())
}

/// `w±(t)`, `0 ≤ t ≤ δ²`, so that `B±_δ(x) = exp(x₁ + w±(x₂ - x₁²))`.
///
/// Evaluated through `u = δ - √(δ² - t) = t/(δ + √(δ² - t))` to stay accurate
/// near `t = 0`.
pub fn w_profile(t: f64, delta: f64, sign: Sign) -> Result<f64> {
    check_delta(delta, sign, false)?;
    let d2 = delta * delta;
    if !(t.is_finite() && t >= 0.0 && t <= d2 * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("t={t} is outside [0, delta^2={d2}]")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let s = (d2 - t).max(0.0).sqrt();
    let u = t / (delta + s);
    Ok(match sign {
        Sign::Plus => (u / (1.0 - delta)).ln_1p() - u,
        Sign::Minus => (-u / (1.0 + delta)).ln_1p() + u,
    })
}

/// `B±_δ(p)`.
///
/// For Plus with `δ ≥ 1` the value is `e^{x₁}` on the lower boundary and `+∞`
/// everywhere else.
pub fn bellman_value(p: BellmanPoint, delta: f64, sign: Sign) -> Result<ExtendedValue> {
    check_delta(delta, sign, true)?;
    vertical_gap(p, delta)?;
    if sign == Sign::Plus && delta >= 1.0 {
        return Ok(if p.variance() == 0.0 { ExtendedValue::from_f64(p.x1().exp()) } else { ExtendedValue::Infinite });
    }
    let w = w_profile(p.variance().min(delta * delta), delta, sign)?;
    Ok(ExtendedValue::from_f64((p.x1() + w).exp()))
}

/// Closed-form gradient and Hessian of `B±_δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellmanDerivatives {
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl BellmanDerivatives {
    pub fn hessian_det(&self) -> f64 {
        self.hess[0][0] * self.hess[1][1] - self.hess[0][1] * self.hess[1][0]
    }
}

struct Pieces {
    g: f64,
    e: f64,
    denom: f64,
    s: f64,
}

fn pieces(p: BellmanPoint, delta: f64, sign: Sign) -> Result<Pieces> {
    check_delta(delta, sign, false)?;
    let g = vertical_gap(p, delta)?;
    if g <= BOUNDARY_GAP_TOL {
        return Err(Error::Domain(format!(
            "point ({}, {}) is on the upper boundary of the delta={delta} strip",
            p.x1(),
            p.x2()
        )));
    }
    let s = sign.factor();
    Ok(Pieces { g, e: (p.x1() + s * (g - delta)).exp(), denom: 1.0 - s * delta, s })
}

/// Gradient and Hessian of `B±_δ` at an interior point (`g > 1e-10`).
pub fn bellman_derivatives(p: BellmanPoint, delta: f64, sign: Sign) -> Result<BellmanDerivatives> {
    let Pieces { g, e, denom, s } = pieces(p, delta, sign)?;
    let x1 = p.x1();
    let k = x1 + s * g;
    let base = e / denom;
    let grad = [(1.0 - x1 - s * g) * base, 0.5 * base];
    let h11 = -s * k * k / g * base;
    let h12 = s * k / (2.0 * g) * base;
    let h22 = -s / (4.0 * g) * base;
    Ok(BellmanDerivatives { grad, hess: [[h11, h12], [h12, h22]] })
}

/// `∓Σ ∂ᵢⱼB dᵢdⱼ`, written as the perfect square
/// `((x₁ ± g)d₁ - d₂/2)²·e^{x₁±g∓δ}/(g(1∓δ))`.
pub fn quadratic_form(p: BellmanPoint, d: [f64; 2], delta: f64, sign: Sign) -> Result<f64> {
    let Pieces { g, e, denom, s } = pieces(p, delta, sign)?;
    let lin = (p.x1() + s * g) * d[0] - 0.5 * d[1];
    Ok(lin * lin * e / (g * denom))
}

/// Central-difference residual of `(1 - 2w')((w')² + w'') - (w')²` at `t`.
///
/// Also checks the sign condition `±(2w' - 1) ≥ 0`.
pub fn ode_residual(t: f64, delta: f64, sign: Sign, h: f64) -> Result<f64> {
    check_delta(delta, sign, false)?;
    if !(h > 0.0 && t > h && t < delta * delta - h) {
        return Err(Error::Domain(format!("need h < t < delta^2 - h, got t={t}, h={h}, delta={delta}")));
    }
    let wm = w_profile(t - h, delta, sign)?;
    let w0 = w_profile(t, delta, sign)?;
    let wp = w_profile(t + h, delta, sign)?;
    let w1 = (wp - wm) / (2.0 * h);
    let w2 = (wp - 2.0 * w0 + wm) / (h * h);
    if sign.factor() * (2.0 * w1 - 1.0) < 0.0 {
        return Err(Error::Numerical(format!(
            "sign condition fails at t={t}: w'={w1} for the {} profile",
            sign.name()
        )));
    }
    Ok((1.0 - 2.0 * w1) * (w1 * w1 + w2) - w1 * w1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x1: f64, x2: f64) -> BellmanPoint {
        BellmanPoint::new(x1, x2).unwrap()
    }

    #[test]
    fn corner_value_is_the_dyadic_constant_shape() {
        let eps: f64 = 0.5;
        let b = bellman_value(pt(0.0, eps * eps), eps, Sign::Plus).unwrap().to_f64();
        assert!((b - (-eps).exp() / (1.0 - eps)).abs() < 1e-14);
    }

    #[test]
    fn lower_boundary_is_exponential() {
        for sign in [Sign::Plus, Sign::Minus] {
            let b = bellman_value(pt(0.3, 0.09), 0.4, sign).unwrap().to_f64();
            assert!((b - 0.3f64.exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn large_delta_plus_is_infinite_off_the_bottom() {
        assert_eq!(bellman_value(pt(0.0, 0.5), 1.0, Sign::Plus).unwrap(), ExtendedValue::Infinite);
        assert_eq!(bellman_value(pt(0.2, 0.04), 1.5, Sign::Plus).unwrap(), ExtendedValue::Finite(0.2f64.exp()));
    }

    #[test]
    fn outside_the_strip_is_a_domain_error() {
        assert!(matches!(bellman_value(pt(0.0, 0.3), 0.5, Sign::Plus), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_matches_profile_form() {
        for &(x1, x2, delta) in &[(0.1, 0.2, 0.5), (-0.7, 0.55, 0.3), (1.2, 1.5, 0.9)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let p = pt(x1, x2);
                let g = vertical_gap(p, delta).unwrap();
                let s = sign.factor();
                let direct = (1.0 - s * g) / (1.0 - s * delta) * (x1 + s * g - s * delta).exp();
                let b = bellman_value(p, delta, sign).unwrap().to_f64();
                assert!(((b - direct) / direct).abs() < 1e-12, "{x1} {x2} {delta} {sign:?}");
            }
        }
    }

    #[test]
    fn profile_vanishes_at_zero() {
        assert_eq!(w_profile(0.0, 0.5, Sign::Plus).unwrap(), 0.0);
        assert_eq!(w_profile(0.0, 0.5, Sign::Minus).unwrap(), 0.0);
        assert!(w_profile(0.0, 1.2, Sign::Plus).is_err());
    }

    #[test]
    fn quadratic_form_example() {
        let p = pt(0.0, 0.1);
        let g = 0.15f64.sqrt();
        let want = g * g * (g - 0.5).exp() / (g * 0.5);
        let q = quadratic_form(p, [1.0, 0.0], 0.5, Sign::Plus).unwrap();
        assert!((q - want).abs() < 1e-14);
    }

    #[test]
    fn ode_examples() {
        assert!(ode_residual(0.125, 0.5, Sign::Plus, 1e-4).unwrap().abs() < 1e-6);
        assert!(ode_residual(0.81 / 4.0, 0.9, Sign::Minus, 1e-4).unwrap().abs() < 1e-6);
        assert!(ode_residual(0.0, 0.5, Sign::Plus, 1e-4).is_err());
    }
}
