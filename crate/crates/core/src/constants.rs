//! Sharp constants of the integral John–Nirenberg inequality and the
//! strip radii δ±(ε) at which the dyadic Bellman functions live.
//!
//! `C(ε)` is the continuous constant, `C_d(ε)` the dyadic one on the line,
//! and [`conjectured_nd`] gives the (unproven) analogue for dyadic cubes in
//! `R^n`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bellman::Sign;
use crate::error::{Error, Result};

/// Width below which the root bracket is considered converged.
pub const ROOT_BRACKET_WIDTH: f64 = 1e-13;
/// Largest acceptable `|g(δ, ε)|` at a reported root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Denominators at or below this are treated as a blow-up.
pub const BLOWUP_TOL: f64 = 1e-14;

/// Blow-up threshold of the dyadic constant on the line, `√2·ln 2`.
pub fn eps0_dyadic() -> f64 {
    std::f64::consts::SQRT_2 * std::f64::consts::LN_2
}

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedValue {
    Finite(f64),
    Infinite,
}

impl ExtendedValue {
    /// Wraps `x`, mapping `+∞` (and overflow) to [`ExtendedValue::Infinite`].
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            ExtendedValue::Finite(x)
        } else {
            ExtendedValue::Infinite
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedValue::Finite(x) => Some(x),
            ExtendedValue::Infinite => None,
        }
    }

    /// `f64` view, with `Infinite` as `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(x) => write!(f, "{}", crate::cli::fmt_sig(*x)),
            ExtendedValue::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedValue::Finite(x) => s.serialize_f64(*x),
            ExtendedValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtendedValue::from_f64(x)),
            Raw::Str(s) if s == "inf" => Ok(ExtendedValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Parameter(format!("eps must be a finite non-negative number, got {eps}")));
    }
    Ok(())
}

/// `C(ε) = e^{-ε}/(1-ε)`, infinite for `ε ≥ 1`.
pub fn c_continuous(eps: f64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    if eps >= 1.0 {
        return Ok(ExtendedValue::Infinite);
    }
    Ok(ExtendedValue::from_f64((-eps).exp() / (1.0 - eps)))
}

/// `C_d(ε) = e^{-ε/√2}/(2 - e^{ε/√2})`, infinite for `ε ≥ √2·ln 2`.
pub fn c_dyadic(eps: f64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    let c = eps / std::f64::consts::SQRT_2;
    let denom = 2.0 - c.exp();
    if eps >= eps0_dyadic() || denom <= BLOWUP_TOL {
        return Ok(ExtendedValue::Infinite);
    }
    Ok(ExtendedValue::from_f64((-c).exp() / denom))
}

fn check_delta_eps(delta: f64, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("need finite eps > 0 and delta, got eps={eps}, delta={delta}")));
    }
    if delta < eps {
        return Err(Error::Domain(format!("delta={delta} is below eps={eps}")));
    }
    Ok(((delta - eps) * (delta + eps)).sqrt())
}

/// The function whose zero in δ defines δ±(ε).
///
/// Plus: `(1-r)e^r(2-e^{ε/√2}) - (1-δ)e^{δ-ε/√2}`,
/// Minus: `(1+r)e^{-r}(2-e^{-ε/√2}) - (1+δ)e^{-δ+ε/√2}`, with `r = √(δ²-ε²)`.
pub fn g_function(delta: f64, eps: f64, sign: Sign) -> Result<f64> {
    let r = check_delta_eps(delta, eps)?;
    let c = eps / std::f64::consts::SQRT_2;
    Ok(match sign {
        Sign::Plus => (1.0 - r) * r.exp() * (2.0 - c.exp()) - (1.0 - delta) * (delta - c).exp(),
        Sign::Minus => (1.0 + r) * (-r).exp() * (2.0 - (-c).exp()) - (1.0 + delta) * (c - delta).exp(),
    })
}

/// `∂g/∂δ`.
pub fn g_derivative(delta: f64, eps: f64, sign: Sign) -> Result<f64> {
    let r = check_delta_eps(delta, eps)?;
    let c = eps / std::f64::consts::SQRT_2;
    Ok(match sign {
        Sign::Plus => delta * ((delta - c).exp() - r.exp() * (2.0 - c.exp())),
        Sign::Minus => delta * ((c - delta).exp() - (-r).exp() * (2.0 - (-c).exp())),
    })
}

/// A root of `g(·, ε)` together with the final bisection bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

/// Bisection to [`ROOT_BRACKET_WIDTH`] followed by one Newton step that is
/// kept only if it stays inside the bracket and does not increase `|f|`.
pub(crate) fn solve_bracketed(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<RootResult> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() || flo == 0.0 || fhi == 0.0 {
        return Err(Error::Numerical(format!(
            "bracket [{lo}, {hi}] does not straddle a sign change (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..400 {
        if hi - lo <= ROOT_BRACKET_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    let mut root = mid;
    let d = df(mid);
    if d != 0.0 && d.is_finite() {
        let cand = mid - fmid / d;
        if cand > lo && cand < hi && f(cand).abs() <= fmid.abs() {
            root = cand;
        }
    }
    Ok(RootResult { root, residual: f(root).abs(), bracket_lo: lo, bracket_hi: hi })
}

/// δ±(ε): the unique zero of [`g_function`] in `(ε, 1)` (Plus) or
/// `(ε, 3ε/(2√2))` (Minus).
pub fn delta_root(eps: f64, sign: Sign) -> Result<RootResult> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive and finite, got {eps}")));
    }
    let cap = 3.0 * eps / (2.0 * std::f64::consts::SQRT_2);
    let hi = match sign {
        Sign::Plus => {
            if eps >= eps0_dyadic() {
                return Err(Error::Domain(format!(
                    "no root: eps={eps} >= sqrt(2)*log(2), the dyadic constant is infinite"
                )));
            }
            1.0
        }
        Sign::Minus => cap,
    };
    let res = solve_bracketed(
        |d| g_function(d, eps, sign).unwrap_or(f64::NAN),
        |d| g_derivative(d, eps, sign).unwrap_or(f64::NAN),
        eps,
        hi,
    )?;
    if res.residual > ROOT_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "root of g at eps={eps} has residual {} > {ROOT_RESIDUAL_TOL}",
            res.residual
        )));
    }
    if sign == Sign::Plus && res.root > cap + ROOT_BRACKET_WIDTH {
        return Err(Error::Numerical(format!("delta_plus={} exceeds 3*eps/(2*sqrt 2)={cap}", res.root)));
    }
    Ok(res)
}

/// Conjectured constants for dyadic cubes in `R^n`.
///
/// Only `n = 1` is a theorem; for `n ≥ 2` the `conjectural` flag is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjecturedConstants {
    pub n: u32,
    pub c_nd: ExtendedValue,
    pub eps0_nd: f64,
    pub delta_plus_nd: Option<f64>,
    pub delta_minus_nd: Option<f64>,
    pub conjectural: bool,
}

/// `ε_0(n) = n·ln 2/(2^{n/2} - 2^{-n/2})`.
pub fn eps0_nd(n: u32) -> f64 {
    let h = 2f64.powf(n as f64 / 2.0);
    n as f64 * std::f64::consts::LN_2 / (h - 1.0 / h)
}

fn nd_equation(delta: f64, eps: f64, n: u32, sign: Sign) -> f64 {
    let r = ((delta - eps) * (delta + eps)).max(0.0).sqrt();
    let two_n = 2f64.powi(n as i32);
    let h = 2f64.powf(n as f64 / 2.0);
    let k = h - 1.0 / h;
    let s = sign.factor();
    (1.0 - s * r) * (s * (r - delta)).exp() * (two_n - (s * k * eps).exp())
        - (1.0 - s * delta) * (two_n - 1.0) * (-s * eps / h).exp()
}

fn nd_equation_derivative(delta: f64, eps: f64, n: u32, sign: Sign) -> f64 {
    let step = 1e-7 * delta.max(1e-3);
    (nd_equation(delta + step, eps, n, sign) - nd_equation(delta - step, eps, n, sign)) / (2.0 * step)
}

/// Constants and strip radii for the conjectured `n`-dimensional dyadic case.
pub fn conjectured_nd(eps: f64, n: u32) -> Result<ConjecturedConstants> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::Parameter("dimension n must be at least 1".into()));
    }
    let two_n = 2f64.powi(n as i32);
    let h = 2f64.powf(n as f64 / 2.0);
    let k = h - 1.0 / h;
    let eps0 = eps0_nd(n);
    let denom = two_n - (k * eps).exp();
    let c_nd = if eps >= eps0 || denom <= BLOWUP_TOL {
        ExtendedValue::Infinite
    } else {
        ExtendedValue::from_f64((two_n - 1.0) * (-eps / h).exp() / denom)
    };
    let conjectural = n >= 2;
    if eps == 0.0 {
        return Ok(ConjecturedConstants {
            n,
            c_nd,
            eps0_nd: eps0,
            delta_plus_nd: Some(0.0),
            delta_minus_nd: Some(0.0),
            conjectural,
        });
    }
    let delta_plus_nd = if c_nd.is_finite() {
        let r = solve_bracketed(
            |d| nd_equation(d, eps, n, Sign::Plus),
            |d| nd_equation_derivative(d, eps, n, Sign::Plus),
            eps,
            1.0,
        )?;
        Some(r.root)
    } else {
        None
    };
    let fm = |d| nd_equation(d, eps, n, Sign::Minus);
    let mut hi = 2.0 * eps;
    let mut widenings = 0;
    while fm(hi) >= 0.0 {
        widenings += 1;
        if widenings > 20 {
            return Err(Error::Numerical(format!("no sign change for the minus equation up to delta={hi}")));
        }
        hi *= 2.0;
    }
    let rm = solve_bracketed(fm, |d| nd_equation_derivative(d, eps, n, Sign::Minus), eps, hi)?;
    Ok(ConjecturedConstants { n, c_nd, eps0_nd: eps0, delta_plus_nd, delta_minus_nd: Some(rm.root), conjectural })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_continuous_values() {
        assert!((c_continuous(0.5).unwrap().to_f64() - 1.213_061_319_425_267).abs() < 1e-14);
        assert_eq!(c_continuous(0.0).unwrap(), ExtendedValue::Finite(1.0));
        assert_eq!(c_continuous(1.0).unwrap(), ExtendedValue::Infinite);
        assert!(c_continuous(-0.1).is_err());
    }

    #[test]
    fn c_dyadic_values() {
        let c = 0.5 / std::f64::consts::SQRT_2;
        let want = (-c).exp() / (2.0 - c.exp());
        assert!((c_dyadic(0.5).unwrap().to_f64() - want).abs() < 1e-14);
        assert_eq!(c_dyadic(0.9803).unwrap(), ExtendedValue::Infinite);
        assert!(c_dyadic(0.98).unwrap().is_finite());
    }

    #[test]
    fn root_brackets_have_the_right_signs() {
        for &eps in &[0.01, 0.2, 0.5, 0.9, 0.97] {
            assert!(g_function(eps, eps, Sign::Plus).unwrap() < 0.0);
            assert!(g_function(1.0, eps, Sign::Plus).unwrap() > 0.0);
            let cap = 3.0 * eps / (2.0 * std::f64::consts::SQRT_2);
            assert!(g_function(eps, eps, Sign::Minus).unwrap() > 0.0);
            assert!(g_function(cap, eps, Sign::Minus).unwrap() < 0.0);
        }
    }

    #[test]
    fn delta_root_examples() {
        let r = delta_root(0.5, Sign::Plus).unwrap();
        assert!(r.root > 0.5 && r.root < 0.5303);
        assert!(r.residual <= ROOT_RESIDUAL_TOL);
        assert!(r.bracket_lo < r.root && r.root < r.bracket_hi);
        let m = delta_root(0.5, Sign::Minus).unwrap();
        assert!(m.root > 0.5 && m.root < 0.5303);
        assert!(matches!(delta_root(0.99, Sign::Plus), Err(Error::Domain(_))));
    }

    #[test]
    fn conjectured_reduces_to_line() {
        let c = conjectured_nd(0.4, 1).unwrap();
        assert!(!c.conjectural);
        assert!((c.c_nd.to_f64() - c_dyadic(0.4).unwrap().to_f64()).abs() < 1e-14);
        assert!((c.eps0_nd - eps0_dyadic()).abs() < 1e-15);
        let z = conjectured_nd(0.0, 3).unwrap();
        assert_eq!(z.c_nd, ExtendedValue::Finite(1.0));
        assert!(conjectured_nd(0.3, 2).unwrap().conjectural);
    }

    #[test]
    fn extended_value_json() {
        let s = serde_json::to_string(&[ExtendedValue::Finite(1.5), ExtendedValue::Infinite]).unwrap();
        assert_eq!(s, "[1.5,\"inf\"]");
        let back: Vec<ExtendedValue> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![ExtendedValue::Finite(1.5), ExtendedValue::Infinite]);
    }
}
