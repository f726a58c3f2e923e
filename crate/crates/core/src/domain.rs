//! Points of the parabolic strip `Ω_ε = {x : x₁² ≤ x₂ ≤ x₁² + ε²}` and the
//! interval-splitting search used in the induction on dyadic/continuous
//! intervals.

use serde::{Deserialize, Serialize};

use crate::bellman::Sign;
use crate::error::{Error, Result};
use crate::piecewise::{Moments, PiecewiseFunction};

/// Membership tolerance for `x₂ ≥ x₁²` and `x₂ ≤ x₁² + ε²`.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point `(x₁, x₂) = (⟨φ⟩, ⟨φ²⟩)` with `x₂ ≥ x₁²`.
///
/// Stored as mean and variance so that `x₂ - x₁²` does not suffer from
/// cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellmanPoint {
    x1: f64,
    var: f64,
}

impl BellmanPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite()) {
            return Err(Error::Domain(format!("non-finite point ({x1}, {x2})")));
        }
        let var = x2 - x1 * x1;
        if var < -MEMBERSHIP_TOL * (1.0 + x1 * x1) {
            return Err(Error::Domain(format!("point ({x1}, {x2}) lies below the parabola x2 = x1^2")));
        }
        Ok(BellmanPoint { x1, var: var.max(0.0) })
    }

    /// The point with mean `x1` and variance `var ≥ 0`.
    pub fn from_mean_variance(x1: f64, var: f64) -> Result<Self> {
        if !(x1.is_finite() && var.is_finite()) || var < -MEMBERSHIP_TOL {
            return Err(Error::Domain(format!("invalid mean/variance ({x1}, {var})")));
        }
        Ok(BellmanPoint { x1, var: var.max(0.0) })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x1 * self.x1 + self.var
    }

    /// `x₂ - x₁²`.
    pub fn variance(&self) -> f64 {
        self.var
    }
}

/// The strip `Ω_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicStrip {
    eps: f64,
}

impl ParabolicStrip {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Parameter(format!("strip width must be positive, got {eps}")));
        }
        Ok(ParabolicStrip { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn contains(&self, p: BellmanPoint) -> bool {
        contains(*self, p)
    }
}

pub fn contains(strip: ParabolicStrip, p: BellmanPoint) -> bool {
    p.variance() <= strip.eps * strip.eps + MEMBERSHIP_TOL
}

/// `√(δ² + x₁² - x₂)`, the distance to the upper boundary of `Ω_δ` measured
/// in the tangent parameter.
pub fn vertical_gap(p: BellmanPoint, delta: f64) -> Result<f64> {
    let rad = delta * delta - p.variance();
    if rad < -MEMBERSHIP_TOL {
        return Err(Error::Domain(format!("point ({}, {}) lies above x2 = x1^2 + {}^2", p.x1(), p.x2(), delta)));
    }
    Ok(rad.max(0.0).sqrt())
}

/// Abscissa `c` of the tangency point of the extremal line through `p`.
///
/// The line is `x₂ = 2c·x₁ + δ² - c²`; Plus uses `c = x₁ + gap`, Minus
/// `c = x₁ - gap`.
pub fn tangent_contact(p: BellmanPoint, delta: f64, sign: Sign) -> Result<f64> {
    Ok(p.x1() + sign.factor() * vertical_gap(p, delta)?)
}

/// `max_{t∈[0,1]} (x₂ - x₁²)` along the segment from `p` to `q`.
///
/// Along the segment the excess is the concave quadratic
/// `(1-t)v_p + t·v_q + t(1-t)(q₁-p₁)²`.
pub fn segment_max_excess(p: BellmanPoint, q: BellmanPoint) -> f64 {
    let (vp, vq) = (p.variance(), q.variance());
    let d = q.x1() - p.x1();
    let d2 = d * d;
    let t = if d2 > 0.0 { (0.5 + (vq - vp) / (2.0 * d2)).clamp(0.0, 1.0) } else { 0.0 };
    let at = |t: f64| (1.0 - t) * vp + t * vq + t * (1.0 - t) * d2;
    at(t).max(vp).max(vq)
}

/// Outcome of [`split_interval`] on `(0, 1]`.
///
/// `(0, 1]` is cut into `I₋ = (0, 1-α₊]` and `I₊ = (1-α₊, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub alpha_plus: f64,
    pub x0: BellmanPoint,
    pub x_minus: BellmanPoint,
    pub x_plus: BellmanPoint,
    /// Max of `x₂ - x₁²` over `[ξ, x⁰]` at the stopping `α₊` (over the whole
    /// segment when the midpoint split already works).
    pub rho_value: f64,
    /// Whether the midpoint split failed and the tangency search ran.
    pub tangency: bool,
}

const SPLIT_MAX_ITER: usize = 200;
const SPLIT_INTERVAL_TOL: f64 = 1e-12;
/// Tolerance on `ρ(α₊) = ε₁²` at the stopping point.
pub const SPLIT_RHO_TOL: f64 = 1e-9;

fn point_on(phi: &PiecewiseFunction, lo: f64, hi: f64) -> Result<BellmanPoint> {
    let m = phi.moments(lo, hi)?;
    BellmanPoint::from_mean_variance(m.mean, m.variance)
}

/// Splits `(0, 1]` so that the segment `[x⁻, x⁺]` stays inside `Ω_{ε₁}`.
///
/// Starts from the midpoint split. If that segment leaves `Ω_{ε₁}`, moves
/// `α₊` so that the offending endpoint `ξ` slides towards `x⁰`, bisecting on
/// the sign of `ρ(α₊) - ε₁²` until the segment is tangent to the upper
/// boundary of `Ω_{ε₁}`.
pub fn split_interval(phi: &PiecewiseFunction, eps: f64, eps1: f64) -> Result<SplitResult> {
    if !(eps > 0.0 && eps1 > eps && eps1.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < eps < eps1, got eps={eps}, eps1={eps1}")));
    }
    let cap = eps1 * eps1;
    let x0 = point_on(phi, 0.0, 1.0)?;
    if x0.variance() > eps * eps + MEMBERSHIP_TOL {
        return Err(Error::Precondition(format!("the average over (0,1] has variance {} > eps^2", x0.variance())));
    }
    let split = |alpha_plus: f64| -> Result<(BellmanPoint, BellmanPoint)> {
        let cut = 1.0 - alpha_plus;
        Ok((point_on(phi, 0.0, cut)?, point_on(phi, cut, 1.0)?))
    };
    let (xm, xp) = split(0.5)?;
    let whole = segment_max_excess(xm, xp);
    if whole <= cap {
        return Ok(SplitResult { alpha_plus: 0.5, x0, x_minus: xm, x_plus: xp, rho_value: whole, tangency: false });
    }
    let bad_minus = segment_max_excess(xm, x0) > cap;
    let bad_plus = segment_max_excess(xp, x0) > cap;
    let xi_is_plus = match (bad_minus, bad_plus) {
        (false, true) => true,
        (true, false) => false,
        _ => return Err(Error::Numerical(format!("both halves of the midpoint split leave the eps1={eps1} strip"))),
    };
    // rho as a function of alpha_plus; xi = x+ grows I+, xi = x- shrinks it.
    let rho = |alpha_plus: f64| -> Result<f64> {
        let (m, p) = split(alpha_plus)?;
        Ok(segment_max_excess(if xi_is_plus { p } else { m }, x0))
    };
    // `bad` end has rho > cap, `good` end has rho <= cap (xi = x0 there).
    let (mut bad, mut good): (f64, f64) = if xi_is_plus { (0.5, 1.0) } else { (0.5, 0.0) };
    let mut iters = 0;
    while (good - bad).abs() > SPLIT_INTERVAL_TOL {
        iters += 1;
        if iters > SPLIT_MAX_ITER {
            return Err(Error::Numerical("split search did not converge in 200 iterations".into()));
        }
        let mid = 0.5 * (bad + good);
        if rho(mid)? > cap {
            bad = mid;
        } else {
            good = mid;
        }
    }
    let alpha_plus = good;
    let rho_value = rho(alpha_plus)?;
    if (rho_value - cap).abs() > SPLIT_RHO_TOL {
        return Err(Error::Numerical(format!("split search stopped with rho={rho_value}, expected eps1^2={cap}")));
    }
    let floor = (1.0 - (eps / eps1).powi(2)).sqrt();
    if alpha_plus.min(1.0 - alpha_plus) < floor - SPLIT_INTERVAL_TOL {
        return Err(Error::Numerical(format!("split alpha_plus={alpha_plus} violates the lower bound {floor}")));
    }
    let (x_minus, x_plus) = split(alpha_plus)?;
    Ok(SplitResult { alpha_plus, x0, x_minus, x_plus, rho_value, tangency: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{Segment, Shape};

    #[test]
    fn point_validation() {
        assert!(BellmanPoint::new(0.5, 0.2).is_err());
        assert!(BellmanPoint::new(0.5, 0.25).is_ok());
        assert!(BellmanPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn gap_and_contact() {
        let p = BellmanPoint::new(0.0, 0.25).unwrap();
        let g = vertical_gap(p, 0.53).unwrap();
        assert!((g - 0.0309f64.sqrt()).abs() < 1e-15);
        assert!(vertical_gap(p, 0.4).is_err());
        assert!((tangent_contact(p, 0.53, Sign::Plus).unwrap() - g).abs() < 1e-15);
        assert!((tangent_contact(p, 0.53, Sign::Minus).unwrap() + g).abs() < 1e-15);
        let strip = ParabolicStrip::new(0.5).unwrap();
        assert!(strip.contains(p));
        assert!(!strip.contains(BellmanPoint::new(0.0, 0.26).unwrap()));
    }

    #[test]
    fn segment_excess_is_the_concave_max() {
        let p = BellmanPoint::new(-0.3, 0.09).unwrap();
        let q = BellmanPoint::new(0.3, 0.09).unwrap();
        assert!((segment_max_excess(p, q) - 0.09).abs() < 1e-15);
        let brute = (0..=1000)
            .map(|i| {
                let t = i as f64 / 1000.0;
                let x1 = (1.0 - t) * p.x1() + t * q.x1();
                (1.0 - t) * p.x2() + t * q.x2() - x1 * x1
            })
            .fold(f64::MIN, f64::max);
        assert!((segment_max_excess(p, q) - brute).abs() < 1e-12);
    }

    #[test]
    fn constant_function_splits_in_half() {
        let phi =
            PiecewiseFunction::new(vec![Segment { lo: 0.0, hi: 1.0, shape: Shape::Constant { value: 0.7 } }]).unwrap();
        let s = split_interval(&phi, 0.5, 0.55).unwrap();
        assert_eq!(s.alpha_plus, 0.5);
        assert_eq!(s.rho_value, 0.0);
        assert!(!s.tangency);
    }

    #[test]
    fn tangency_branch_stops_on_the_wider_parabola() {
        let (eps, a) = (0.5, 0.9);
        let phi = PiecewiseFunction::new(vec![
            Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma: eps, a, b: 0.0 } },
            Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: 0.0 } },
        ])
        .unwrap();
        let eps1 = 1.02 * eps;
        let s = split_interval(&phi, eps, eps1).unwrap();
        assert!(s.tangency);
        assert!((s.rho_value - eps1 * eps1).abs() <= SPLIT_RHO_TOL);
        let floor = (1.0 - (eps / eps1).powi(2)).sqrt();
        assert!(s.alpha_plus.min(1.0 - s.alpha_plus) >= floor);
    }
}
