//! Functions that attain the Bellman bounds.
//!
//! Continuous case: `φ = γ·ln(a/t) + b` on `(0, a]` and `b` on `(a, 1]`.
//! Dyadic case: `x₁ ± ψ`, where `ψ` places a shifted copy of the base
//! staircase `φ₀` on the block `(2^{-k}, 2^{-k+1}]` whenever the `k`-th binary
//! digit of `α` is 1 and the constant `γ` otherwise.

use serde::{Deserialize, Serialize};

use crate::bellman::Sign;
use crate::constants::{delta_root, eps0_dyadic};
use crate::domain::{vertical_gap, BellmanPoint, ParabolicStrip};
use crate::error::{Error, Result};
use crate::piecewise::{DyadicNode, DyadicStepFunction, Moments, PiecewiseFunction, Segment, Shape};

/// Below this the point is treated as lying on the lower boundary.
const BOUNDARY_TOL: f64 = 1e-14;

fn check_point(p: BellmanPoint, eps: f64) -> Result<()> {
    let strip = ParabolicStrip::new(eps)?;
    if !strip.contains(p) {
        return Err(Error::Domain(format!("point ({}, {}) is outside the eps={eps} strip", p.x1(), p.x2())));
    }
    Ok(())
}

/// Continuous extremizer for `B±_ε(p)`: `γ = ±ε`, `a = 1 - gap/ε`,
/// `b = x₁ - γa`.
pub fn continuous_extremal(p: BellmanPoint, eps: f64, sign: Sign) -> Result<PiecewiseFunction> {
    check_point(p, eps)?;
    if sign == Sign::Plus && eps >= 1.0 {
        return Err(Error::Domain(format!("eps={eps} >= 1: the plus Bellman function is infinite")));
    }
    if p.variance() <= BOUNDARY_TOL {
        return PiecewiseFunction::constant(p.x1());
    }
    let gamma = sign.factor() * eps;
    let a = (1.0 - vertical_gap(p, eps)? / eps).clamp(f64::MIN_POSITIVE, 1.0);
    let b = p.x1() - gamma * a;
    let mut segs = vec![Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma, a, b } }];
    if a < 1.0 {
        segs.push(Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: b } });
    }
    PiecewiseFunction::new(segs)
}

/// Base staircase `φ₀`: the value `(k-1)·ε/√2` on `(2^{-(k+1)}, 2^{-k}]`.
///
/// The first `depth` blocks are written out as explicit splits; the rest is
/// one staircase node.
pub fn dyadic_base(eps: f64, depth: usize) -> Result<DyadicStepFunction> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Parameter(format!("eps must be finite and non-negative, got {eps}")));
    }
    let a = eps / std::f64::consts::SQRT_2;
    let mut node = DyadicNode::Staircase { first: (depth as f64 - 1.0) * a, step: a };
    for k in (0..depth).rev() {
        node = DyadicNode::Split {
            left: Box::new(node),
            right: Box::new(DyadicNode::Constant { value: (k as f64 - 1.0) * a }),
        };
    }
    DyadicStepFunction::new(node)
}

/// `r₁ = √(δ²-ε²)`, `r₂ = √(δ²-x₂+x₁²)`, `β = r₂-r₁`, `γ = r₂-δ`,
/// `α = (δ-r₂)/(δ-r₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalParams {
    pub r1: f64,
    pub r2: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl ExtremalParams {
    pub fn new(p: BellmanPoint, eps: f64, delta: f64) -> Result<Self> {
        check_point(p, eps)?;
        if delta.is_nan() || delta <= eps {
            return Err(Error::Parameter(format!("need delta > eps, got delta={delta}, eps={eps}")));
        }
        let r1 = ((delta - eps) * (delta + eps)).sqrt();
        let r2 = vertical_gap(p, delta)?.max(r1);
        let alpha = ((delta - r2) / (delta - r1)).clamp(0.0, 1.0);
        Ok(ExtremalParams { r1, r2, beta: r2 - r1, gamma: r2 - delta, alpha })
    }
}

/// A dyadic extremizer with the data used to build it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicExtremal {
    pub function: DyadicStepFunction,
    pub params: ExtremalParams,
    pub delta: f64,
    pub sign: Sign,
    pub digits: Vec<u8>,
    /// Bound on `|⟨e^{±φ}⟩ - B±|` caused by cutting the digit stream of `α`.
    pub truncation_bound: f64,
}

/// Dyadic extremizer `x₁ ± ψ` for `B±_{δ±(ε)}(p)`, reading `depth` digits of
/// `α` (the remaining ones are taken to be zero).
///
/// On the upper boundary `x₂ = x₁² + ε²` the extremizer is `x₁ ± φ₀` and no
/// truncation happens.
pub fn dyadic_extremal(p: BellmanPoint, eps: f64, sign: Sign, depth: usize) -> Result<DyadicExtremal> {
    check_point(p, eps)?;
    if sign == Sign::Plus && eps >= eps0_dyadic() {
        return Err(Error::Domain(format!("eps={eps} >= sqrt(2)*log(2): no dyadic extremizer")));
    }
    if depth > 1000 {
        return Err(Error::Parameter(format!("depth {depth} is unreasonably large")));
    }
    let delta = delta_root(eps, sign)?.root;
    let params = ExtremalParams::new(p, eps, delta)?;
    let s = sign.factor();
    let a = eps / std::f64::consts::SQRT_2;
    if eps * eps - p.variance() <= BOUNDARY_TOL {
        let function = DyadicStepFunction::staircase(-a, a)?.affine(p.x1(), s);
        return Ok(DyadicExtremal { function, params, delta, sign, digits: vec![1; depth], truncation_bound: 0.0 });
    }
    let digits = crate::piecewise::dyadic_digits(params.alpha, depth)?;
    let block_stair = DyadicNode::Staircase { first: params.beta - a, step: a };
    let block_const = DyadicNode::Constant { value: params.gamma };
    let mut node = block_const.clone();
    for &d in digits.iter().rev() {
        let block = if d == 1 { block_stair.clone() } else { block_const.clone() };
        node = DyadicNode::Split { left: Box::new(node), right: Box::new(block) };
    }
    let function = DyadicStepFunction::new(node)?.affine(p.x1(), s);
    let stair = DyadicStepFunction::new(block_stair)?.affine(p.x1(), s).exp_mean().to_f64();
    let flat = (p.x1() + s * params.gamma).exp();
    let truncation_bound = (stair - flat).abs() * 0.5f64.powi(depth.min(1074) as i32);
    Ok(DyadicExtremal { function, params, delta, sign, digits, truncation_bound })
}

/// Digits of `α` produced by the geometric construction: at each step the
/// current point `x*` on the extremal line is compared through
/// `δ + r₁` vs `2r₂(x*)` and then reflected through the bottom point
/// `(γ₁, γ₁²)` or the top point `(β₁, β₁² + ε²)`.
///
/// The position of `x*` on the line is carried as its barycentric coordinate
/// `z`, which the reflections double exactly, and `r₂(x*)` is recomputed from
/// `z` each step. Equality stops the stream (the rest is zeros).
pub fn perspective2_digits(p: BellmanPoint, eps: f64, delta: f64, n_digits: usize) -> Result<Vec<u8>> {
    let params = ExtremalParams::new(p, eps, delta)?;
    let spread = delta - params.r1;
    let eq_tol = 8.0 * f64::EPSILON * delta.max(1.0);
    let mut z = params.alpha;
    let mut out = Vec::with_capacity(n_digits);
    for k in 0..n_digits {
        // x* = z·x^t + (1-z)·x^b, so x₂ - x₁² = z·ε² + z(1-z)(β₁-γ₁)².
        let var = z * eps * eps + z * (1.0 - z) * spread * spread;
        if var > eps * eps + 1e-12 || var < -1e-12 {
            return Err(Error::Numerical(format!("iteration {k}: x* left the eps strip (excess {var})")));
        }
        let r2 = (delta * delta - var).max(0.0).sqrt();
        let cmp = delta + params.r1 - 2.0 * r2;
        if cmp.abs() <= eq_tol {
            out.push(1);
            out.resize(n_digits, 0);
            break;
        }
        if cmp < 0.0 {
            out.push(0);
            z *= 2.0;
        } else {
            out.push(1);
            z = 2.0 * z - 1.0;
        }
    }
    Ok(out)
}
