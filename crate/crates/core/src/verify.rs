//! Numerical checks of each step of the Bellman argument.
//!
//! The key inequality is the midpoint test `2B(x⁰) ≥ B(x⁻) + B(x⁺)` (Plus)
//! for all `x⁻, x⁺ ∈ Ω_ε` whose midpoint `x⁰` is in `Ω_ε`. After
//! translating `x⁰₁` to 0 and writing `a = √(δ² - x₂⁰)`, `a± = √(δ² - x₂±)`,
//! `θ = x₁⁺` it becomes `f(a, a₋, a₊, θ) ≥ 0` on the constraint set
//!
//! ```text
//! S = { a, a₋, a₊ ∈ [√(δ²-ε²), δ], θ ≥ 0, a₋² + a₊² = 2a² + 2θ² }
//! ```
//!
//! whose only interesting vertex is the corner where `f` equals `g(δ, ε)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellman::{bellman_derivatives, bellman_value, quadratic_form, Sign};
use crate::constants::{delta_root, g_function};
use crate::domain::{split_interval, BellmanPoint};
use crate::error::{Error, Result};
use crate::extremal::{continuous_extremal, dyadic_extremal};
use crate::piecewise::{bmo_norm_dyadic, DyadicStepFunction, Moments, PiecewiseFunction, Segment, Shape};

/// `f` (Plus) or `f⁻` (Minus) from the module docs.
///
/// Plus: `2(1-a)e^a - (1-a₋)e^{-θ+a₋} - (1-a₊)e^{θ+a₊}`;
/// Minus: `2(1+a)e^{-a} - (1+a₋)e^{-θ-a₋} - (1+a₊)e^{θ-a₊}`.
///
/// For a triple with midpoint abscissa `x⁰₁` this equals
/// `(2B(x⁰) - B(x⁻) - B(x⁺))·(1 ∓ δ)·e^{±δ - x⁰₁}`.
pub fn midpoint_gap(a: f64, a_minus: f64, a_plus: f64, theta: f64, sign: Sign) -> f64 {
    match sign {
        Sign::Plus => {
            2.0 * (1.0 - a) * a.exp()
                - (1.0 - a_minus) * (a_minus - theta).exp()
                - (1.0 - a_plus) * (theta + a_plus).exp()
        }
        Sign::Minus => {
            2.0 * (1.0 + a) * (-a).exp()
                - (1.0 + a_minus) * (-theta - a_minus).exp()
                - (1.0 + a_plus) * (theta - a_plus).exp()
        }
    }
}

/// Result of the grid search over `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    /// Min of `f` (Plus) or max of `f⁻` (Minus) over the sampled points.
    pub extremum: f64,
    /// `(a, a₋, a₊, θ)` at the extremum. Among near-ties the point with the
    /// largest `θ` is reported, since the zero set of `f` also contains the
    /// degenerate and collinear configurations.
    pub argument: [f64; 4],
    pub grid_size: usize,
    pub refined: u32,
    /// `min{0, g(δ,ε)}` (Plus) or `max{0, g⁻(δ,ε)}` (Minus).
    pub predicted: f64,
}

impl ScanReport {
    /// The predicted corner `(r₁, δ, r₁, ε/√2)` (Plus) or `(r₁, r₁, δ, ε/√2)`.
    pub fn corner(delta: f64, eps: f64, sign: Sign) -> [f64; 4] {
        let r1 = ((delta - eps) * (delta + eps)).sqrt();
        let t = eps / std::f64::consts::SQRT_2;
        match sign {
            Sign::Plus => [r1, delta, r1, t],
            Sign::Minus => [r1, r1, delta, t],
        }
    }
}

const SCAN_TIE_TOL: f64 = 1e-11;
const SCAN_REFINE_ROUNDS: u32 = 2;
const SCAN_ZOOM: f64 = 8.0;

/// Grid search of `f` over `S`.
///
/// The grid is over `(a, a₋, a₊) ∈ [r₁, δ]³` with `θ` solved from the
/// constraint, so the corner is a grid vertex. Two refinement rounds zoom
/// `8×` around the current argument.
pub fn scan_constraint_set(delta: f64, eps: f64, sign: Sign, grid: usize) -> Result<ScanReport> {
    if !(eps > 0.0 && delta >= eps && delta.is_finite()) {
        return Err(Error::Domain(format!("need 0 < eps <= delta, got eps={eps}, delta={delta}")));
    }
    if grid < 2 {
        return Err(Error::Parameter("grid needs at least 2 points per axis".into()));
    }
    let r1 = ((delta - eps) * (delta + eps)).sqrt();
    let s = sign.factor();
    // Minimize o = f (Plus) or -f⁻ (Minus).
    let objective = |x: &[f64; 4]| s * midpoint_gap(x[0], x[1], x[2], x[3], sign);
    let mut boxes = [(r1, delta); 3];
    let mut rounds: Vec<(f64, [f64; 4])> = Vec::new();
    for round in 0..=SCAN_REFINE_ROUNDS {
        let axis = |k: usize, i: usize| {
            let (lo, hi) = boxes[k];
            if i + 1 == grid {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (grid - 1) as f64
            }
        };
        let pts: Vec<(f64, [f64; 4])> = (0..grid)
            .into_par_iter()
            .flat_map_iter(|i| {
                let a = axis(0, i);
                (0..grid).flat_map(move |j| {
                    let am = axis(1, j);
                    (0..grid).filter_map(move |k| {
                        let ap = axis(2, k);
                        let ordered = match sign {
                            Sign::Plus => ap <= am,
                            Sign::Minus => ap >= am,
                        };
                        let rad = 0.5 * (am * am + ap * ap) - a * a;
                        if !ordered || rad < 0.0 {
                            return None;
                        }
                        let x = [a, am, ap, rad.sqrt()];
                        Some((objective(&x), x))
                    })
                })
            })
            .collect();
        if pts.is_empty() {
            if round == 0 {
                return Err(Error::Domain("the constraint set has no grid points".into()));
            }
            break;
        }
        let min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let best =
            pts.iter().filter(|p| p.0 <= min + SCAN_TIE_TOL).max_by(|x, y| x.1[3].total_cmp(&y.1[3])).copied().unwrap();
        rounds.push(best);
        for (k, b) in boxes.iter_mut().enumerate() {
            let half = (b.1 - b.0) / (2.0 * SCAN_ZOOM);
            let c = best.1[k];
            *b = ((c - half).max(r1), (c + half).min(delta));
        }
    }
    let min = rounds.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let best =
        rounds.iter().filter(|r| r.0 <= min + SCAN_TIE_TOL).max_by(|x, y| x.1[3].total_cmp(&y.1[3])).copied().unwrap();
    let g = g_function(delta, eps, sign)?;
    let predicted = match sign {
        Sign::Plus => g.min(0.0),
        Sign::Minus => g.max(0.0),
    };
    Ok(ScanReport { extremum: s * min, argument: best.1, grid_size: grid, refined: rounds.len() as u32 - 1, predicted })
}

/// `V(θ) = f(√(δ² - ε²/2 - θ²), δ, r₁, θ)` (Plus) or
/// `V⁻(θ) = f⁻(√(δ² - ε²/2 - θ²), r₁, δ, θ)` (Minus), `θ ∈ [0, ε/√2]`.
///
/// This is `f` along the part of the boundary of `S` where the lower
/// endpoint sits on `x₂ = x₁²` and the upper one on `x₂ = x₁² + ε²`.
pub fn slide_profile(theta: f64, delta: f64, eps: f64, sign: Sign) -> Result<f64> {
    let tmax = eps / std::f64::consts::SQRT_2;
    if !(eps > 0.0 && delta >= eps) {
        return Err(Error::Domain(format!("need 0 < eps <= delta, got eps={eps}, delta={delta}")));
    }
    if !(0.0..=tmax * (1.0 + 1e-12)).contains(&theta) {
        return Err(Error::Domain(format!("theta={theta} is outside [0, eps/sqrt 2]")));
    }
    let r1 = ((delta - eps) * (delta + eps)).sqrt();
    let a = (delta * delta - 0.5 * eps * eps - theta * theta).max(0.0).sqrt();
    Ok(match sign {
        Sign::Plus => midpoint_gap(a, delta, r1, theta, sign),
        Sign::Minus => midpoint_gap(a, r1, delta, theta, sign),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InductionLevel {
    pub depth: u32,
    pub value: f64,
}

/// `2^{-n} Σ_m B(x^{n,m})` for `n = 0..=max_depth`, together with `⟨e^φ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionChain {
    pub levels: Vec<InductionLevel>,
    pub target: f64,
    pub sign: Sign,
    pub delta: f64,
}

impl InductionChain {
    /// Largest step against the expected direction (0 when monotone).
    pub fn worst_violation(&self) -> f64 {
        let s = self.sign.factor();
        self.levels.windows(2).map(|w| s * (w[1].value - w[0].value)).fold(0.0, f64::max)
    }

    /// Largest `|L_{n+1} - L_n|`.
    pub fn max_step(&self) -> f64 {
        self.levels.windows(2).map(|w| (w[1].value - w[0].value).abs()).fold(0.0, f64::max)
    }

    /// Checks monotonicity (nonincreasing for Plus, nondecreasing for Minus)
    /// and that the last level bounds `⟨e^φ⟩` on the correct side.
    pub fn verify(&self, tol: f64) -> Result<()> {
        let scale = |x: f64| tol * x.abs().max(1.0);
        let s = self.sign.factor();
        for w in self.levels.windows(2) {
            if s * (w[1].value - w[0].value) > scale(w[0].value) {
                return Err(Error::Numerical(format!(
                    "induction chain is not monotone between depths {} and {}: {} -> {}",
                    w[0].depth, w[1].depth, w[0].value, w[1].value
                )));
            }
        }
        let last = self.levels.last().map(|l| l.value).unwrap_or(f64::NAN);
        if s * (self.target - last) > scale(last) {
            return Err(Error::Numerical(format!(
                "final level {last} does not bound the exponential average {}",
                self.target
            )));
        }
        Ok(())
    }
}

/// Bellman induction on a dyadic step function: evaluates `B±_{δ±(ε)}` at the
/// averages over every dyadic interval up to `max_depth`.
///
/// Fails with a precondition error (naming the interval) if some dyadic
/// interval has variance above `ε²`.
pub fn bellman_induction(phi: &DyadicStepFunction, eps: f64, sign: Sign, max_depth: u32) -> Result<InductionChain> {
    if max_depth > 20 {
        return Err(Error::Parameter(format!("max_depth {max_depth} is too deep to enumerate")));
    }
    let cap = eps * eps * (1.0 + 1e-9) + 1e-15;
    let delta = delta_root(eps, sign)?.root;
    let mut levels = Vec::with_capacity(max_depth as usize + 1);
    for n in 0..=max_depth {
        let ms = phi.level_moments(n)?;
        let mut sum = 0.0;
        for (m, mt) in ms.iter().enumerate() {
            if mt.variance > cap {
                return Err(Error::Precondition(format!(
                    "dyadic interval ({m}/2^{n}, {}/2^{n}] has variance {} > eps^2 = {}",
                    m + 1,
                    mt.variance,
                    eps * eps
                )));
            }
            let x = BellmanPoint::from_mean_variance(mt.mean, mt.variance.min(eps * eps))?;
            sum += bellman_value(x, delta, sign)?.to_f64();
        }
        levels.push(InductionLevel { depth: n, value: sum / ms.len() as f64 });
    }
    if bmo_norm_dyadic(phi, u32::MAX) > eps * (1.0 + 1e-9) + 1e-15 {
        return Err(Error::Precondition(format!("a dyadic interval deeper than {max_depth} has variance above eps^2")));
    }
    Ok(InductionChain { levels, target: phi.exp_mean().to_f64(), sign, delta })
}

/// Result of [`brute_force_oracle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best: f64,
    pub bound: f64,
    pub leaves: Vec<f64>,
    pub evaluations: u64,
}

/// Haar-coefficient model of a depth-`d` step function with fixed mean.
///
/// Node `j` (heap order, root 1) has children `2j` (left, mean + h_j) and
/// `2j+1` (right, mean - h_j).
struct Haar {
    depth: u32,
    mean: f64,
    target: f64,
    cap: f64,
    h: Vec<f64>,
}

impl Haar {
    fn n_internal(&self) -> usize {
        (1usize << self.depth) - 1
    }

    fn gen(j: usize) -> u32 {
        usize::BITS - 1 - j.leading_zeros()
    }

    fn leaves(&self) -> Vec<f64> {
        let n = 1usize << self.depth;
        let mut vals = vec![0.0; 2 * n];
        vals[1] = self.mean;
        for j in 1..n {
            vals[2 * j] = vals[j] + self.h[j];
            vals[2 * j + 1] = vals[j] - self.h[j];
        }
        vals[n..].to_vec()
    }

    fn objective(&self) -> f64 {
        let l = self.leaves();
        l.iter().map(|v| v.exp()).sum::<f64>() / l.len() as f64
    }

    /// Variance of every internal node (index 0 unused).
    fn variances(&self) -> Vec<f64> {
        let n = 1usize << self.depth;
        let mut var = vec![0.0; 2 * n];
        for j in (1..n).rev() {
            var[j] = 0.5 * (var[2 * j] + var[2 * j + 1]) + self.h[j] * self.h[j];
        }
        var
    }

    /// Variance carried by non-root coefficients, as seen from the root.
    fn rest(&self) -> f64 {
        (2..=self.n_internal()).map(|j| self.h[j] * self.h[j] * 0.5f64.powi(Self::gen(j) as i32)).sum()
    }

    /// Makes the model feasible: shrinks subtrees whose variance exceeds the
    /// cap, then sets the root coefficient so the total variance is exact.
    fn repair(&mut self) {
        let n = self.n_internal();
        for j in 2..=n {
            let var = self.variances();
            if var[j] > self.cap {
                let f = (self.cap / var[j]).sqrt() * (1.0 - 1e-12);
                let mut stack = vec![j];
                while let Some(k) = stack.pop() {
                    if k <= n {
                        self.h[k] *= f;
                        stack.push(2 * k);
                        stack.push(2 * k + 1);
                    }
                }
            }
        }
        self.fit_root();
    }

    fn fit_root(&mut self) {
        let rest = self.rest();
        if rest > self.target {
            let f = (self.target / rest).sqrt();
            for j in 2..=self.n_internal() {
                self.h[j] *= f;
            }
            self.h[1] = 0.0;
        } else {
            let sgn = if self.h[1] < 0.0 { -1.0 } else { 1.0 };
            self.h[1] = sgn * (self.target - rest).max(0.0).sqrt();
        }
    }

    fn feasible(&self) -> bool {
        let var = self.variances();
        (2..=self.n_internal()).all(|j| var[j] <= self.cap) && var[1] <= self.cap * (1.0 + 1e-12)
    }
}

/// Maximizes `⟨e^φ⟩` over step functions of depth `depth` with
/// `(⟨φ⟩, ⟨φ²⟩) = p` and dyadic norm at most `ε`, by random restarts and
/// coordinate ascent in Haar coefficients.
///
/// Every candidate is exactly feasible, so `best ≤ B⁺_{δ⁺(ε)}(p)` is a test
/// of sharpness, and `best / bound` measures how close finite depth gets.
pub fn brute_force_oracle(p: BellmanPoint, eps: f64, depth: u32, budget: u64, seed: u64) -> Result<OracleResult> {
    if depth == 0 || depth > 6 {
        return Err(Error::Parameter(format!("oracle depth must be in 1..=6, got {depth}")));
    }
    if p.variance() > eps * eps + 1e-12 {
        return Err(Error::Domain(format!("point ({}, {}) is outside the eps={eps} strip", p.x1(), p.x2())));
    }
    let delta = delta_root(eps, Sign::Plus)?.root;
    let bound = bellman_value(p, delta, Sign::Plus)?.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1usize << depth;
    let mut model = Haar { depth, mean: p.x1(), target: p.variance().min(eps * eps), cap: eps * eps, h: vec![0.0; n] };
    let mut evals = 0u64;
    let mut best = (model.objective(), model.leaves());
    if model.target == 0.0 {
        return Ok(OracleResult { best: best.0, bound, leaves: best.1, evaluations: 1 });
    }
    let per_restart = (budget / 8).max(200);
    while evals < budget {
        // Random start: coefficients decay or grow with generation, random signs.
        let ratio: f64 = rng.random_range(0.3..1.6);
        let bias: f64 = rng.random_range(-1.0..1.0);
        for j in 1..n {
            let g = Haar::gen(j) as i32;
            let z: f64 = rng.random_range(-1.0..1.0) + bias;
            model.h[j] = z * ratio.powi(g);
        }
        let scale = (model.target / (model.rest() + model.h[1] * model.h[1]).max(1e-300)).sqrt();
        for v in model.h.iter_mut() {
            *v *= scale;
        }
        model.repair();
        let mut cur = model.objective();
        evals += 1;
        let mut step = 0.5 * eps;
        let start = evals;
        while evals < budget && evals - start < per_restart && step > 1e-7 {
            let mut improved = false;
            for j in 1..n {
                let moves: &[f64] = if j == 1 { &[0.0] } else { &[1.0, -1.0] };
                for &dir in moves {
                    let old = model.h.clone();
                    if j == 1 {
                        // The root magnitude is pinned by the variance; only its sign is free.
                        model.h[1] = -model.h[1];
                    } else {
                        model.h[j] += dir * step;
                        model.fit_root();
                    }
                    evals += 1;
                    if model.feasible() {
                        let v = model.objective();
                        if v > cur {
                            cur = v;
                            improved = true;
                            continue;
                        }
                    }
                    model.h = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur > best.0 && model.feasible() {
            best = (cur, model.leaves());
        }
    }
    Ok(OracleResult { best: best.0, bound, leaves: best.1, evaluations: evals })
}

/// Largest relative discrepancy between the closed-form gradient/Hessian and
/// fourth-order central differences of `B±_δ` with step `h`.
///
/// Each block (gradient, Hessian) is compared in the max norm relative to
/// its own size. Needs the gap to exceed `10h`.
pub fn hessian_fd_check(p: BellmanPoint, delta: f64, sign: Sign, h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let gap = crate::domain::vertical_gap(p, delta)?;
    if gap <= 10.0 * h {
        return Err(Error::Precondition(format!("gap {gap} is not above 10h = {}", 10.0 * h)));
    }
    let an = bellman_derivatives(p, delta, sign)?;
    let b = |i: i32, j: i32| -> Result<f64> {
        let q = BellmanPoint::new(p.x1() + i as f64 * h, p.x2() + j as f64 * h)?;
        Ok(bellman_value(q, delta, sign)?.to_f64())
    };
    const D1: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    const D2: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];
    let (mut g1, mut g2, mut h11, mut h22, mut h12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, w) in D1 {
        g1 += w * b(k, 0)?;
        g2 += w * b(0, k)?;
        for (l, v) in D1 {
            h12 += w * v * b(k, l)?;
        }
    }
    for (k, w) in D2 {
        h11 += w * b(k, 0)?;
        h22 += w * b(0, k)?;
    }
    let (g1, g2) = (g1 / (12.0 * h), g2 / (12.0 * h));
    let (h11, h22, h12) = (h11 / (12.0 * h * h), h22 / (12.0 * h * h), h12 / (144.0 * h * h));
    let gmax = an.grad[0].abs().max(an.grad[1].abs());
    let gerr = (g1 - an.grad[0]).abs().max((g2 - an.grad[1]).abs()) / gmax;
    let hs = &an.hess;
    let hmax = hs[0][0].abs().max(hs[0][1].abs()).max(hs[1][1].abs());
    let herr = (h11 - hs[0][0]).abs().max((h12 - hs[0][1]).abs()).max((h22 - hs[1][1]).abs()) / hmax;
    Ok(gerr.max(herr))
}

/// Random `(t, δ)` where central differences with `h = 1e-4` resolve the
/// profile ODE to better than `1e-6`: `√(δ² - t) ≥ 0.2`, `t ≥ 2e-4`, and
/// `δ ≤ 0.8` for Plus (the Plus profile's higher derivatives grow like
/// `(1-δ)^{-4}`) or `δ ≤ 0.95` for Minus.
pub fn sample_ode_abscissa(rng: &mut impl Rng, sign: Sign) -> (f64, f64) {
    let dmax = match sign {
        Sign::Plus => 0.8,
        Sign::Minus => 0.95,
    };
    let delta: f64 = rng.random_range(0.3..dmax);
    let t = rng.random_range(2e-4..delta * delta - 0.04);
    (t, delta)
}

/// Random point of `Ω_ε` with `x₁ ∈ [-1, 1]`; a third of the samples sit on
/// one of the two boundary parabolas.
pub fn sample_point(rng: &mut impl Rng, eps: f64) -> BellmanPoint {
    let x1 = rng.random_range(-1.0..1.0);
    let u: f64 = rng.random();
    let var = if u < 1.0 / 6.0 {
        0.0
    } else if u < 1.0 / 3.0 {
        eps * eps
    } else {
        eps * eps * rng.random::<f64>()
    };
    BellmanPoint::from_mean_variance(x1, var).expect("valid sample")
}

/// Random `φ_{a,b,γ}` with `|γ| = ε`: `γ·ln(a/t) + b` on `(0, a]`, `b` after.
pub fn sample_log_ramp(rng: &mut impl Rng, eps: f64) -> PiecewiseFunction {
    let gamma = if rng.random::<bool>() { eps } else { -eps };
    let a: f64 = rng.random_range(0.01..=1.0);
    let b: f64 = rng.random_range(-1.0..1.0);
    let mut segs = vec![Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma, a, b } }];
    if a < 1.0 {
        segs.push(Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: b } });
    }
    PiecewiseFunction::new(segs).expect("valid ramp")
}

/// Random depth-`depth` step function with dyadic norm `scale·ε`,
/// `scale ∈ (0, 1]`. Constant samples are redrawn.
pub fn sample_dyadic(rng: &mut impl Rng, eps: f64, depth: u32, scale: f64) -> DyadicStepFunction {
    loop {
        let n = 1usize << depth;
        let shift: f64 = rng.random_range(-0.5..0.5);
        let leaves: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = DyadicStepFunction::from_leaves(&leaves).expect("power of two");
        let norm = bmo_norm_dyadic(&f, depth);
        if norm < 1e-9 {
            continue;
        }
        let k = scale * eps / norm * (1.0 - 1e-12);
        return f.affine(shift, k);
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome { name: name.into(), passed, detail }
    }
}

/// Names accepted by [`run_suite`] besides `all`.
pub const SUITES: &[&str] =
    &["ode", "concavity", "roots", "extremal", "scan", "slide", "midpoint", "induction", "oracle", "split"];

/// Runs a named group of checks (or `all`) at strip width `eps`.
pub fn run_suite(suite: &str, eps: f64, seed: u64) -> Result<Vec<CheckOutcome>> {
    if !(eps > 0.0 && eps < crate::constants::eps0_dyadic()) {
        return Err(Error::Parameter(format!("verify needs 0 < eps < sqrt(2)*log(2), got {eps}")));
    }
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Parameter(format!("unknown suite {suite:?}; expected all or one of {SUITES:?}")));
    };
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        out.extend(run_one(name, eps, &mut rng)?);
    }
    Ok(out)
}

fn run_one(name: &str, eps: f64, rng: &mut ChaCha8Rng) -> Result<Vec<CheckOutcome>> {
    let dp = delta_root(eps, Sign::Plus)?;
    let dm = delta_root(eps, Sign::Minus)?;
    let mut out = Vec::new();
    match name {
        "ode" => {
            let mut worst = 0.0f64;
            for _ in 0..200 {
                let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
                let t = sample_ode_abscissa(rng, sign);
                worst = worst.max(crate::bellman::ode_residual(t.0, t.1, sign, 1e-4)?.abs());
            }
            out.push(CheckOutcome::new("ode residual", worst < 1e-6, format!("max |residual| = {worst:.3e}")));
        }
        "concavity" => {
            let mut worst_q = 0.0f64;
            let mut worst_det = 0.0f64;
            for _ in 0..500 {
                let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
                let delta: f64 = rng.random_range(0.1..0.95);
                let x1 = rng.random_range(-1.0..1.0);
                let var = delta * delta * rng.random_range(0.0..0.99);
                let p = BellmanPoint::from_mean_variance(x1, var)?;
                let d = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                worst_q = worst_q.min(quadratic_form(p, d, delta, sign)?);
                let der = bellman_derivatives(p, delta, sign)?;
                let hs = der.hess;
                let scale = (hs[0][0] * hs[1][1]).abs() + hs[0][1] * hs[0][1];
                worst_det = worst_det.max(der.hessian_det().abs() / scale);
            }
            out.push(CheckOutcome::new("quadratic form >= 0", worst_q >= -1e-12, format!("min = {worst_q:.3e}")));
            out.push(CheckOutcome::new(
                "hessian degenerate",
                worst_det < 1e-8,
                format!("max rel det = {worst_det:.3e}"),
            ));
            let mut worst_fd = 0.0f64;
            for _ in 0..20 {
                let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
                let delta: f64 = rng.random_range(0.3..0.95);
                let g: f64 = delta * rng.random_range(0.25..0.95);
                let p = BellmanPoint::from_mean_variance(rng.random_range(-1.0..1.0), delta * delta - g * g)?;
                worst_fd = worst_fd.max(hessian_fd_check(p, delta, sign, 1e-4)?);
            }
            out.push(CheckOutcome::new("finite differences", worst_fd < 1e-5, format!("max rel err = {worst_fd:.3e}")));
        }
        "roots" => {
            let ok = dp.residual <= 1e-12 && dm.residual <= 1e-12;
            out.push(CheckOutcome::new(
                "delta roots",
                ok,
                format!("delta+ = {:.15}, delta- = {:.15}", dp.root, dm.root),
            ));
            let corner = BellmanPoint::from_mean_variance(0.0, eps * eps)?;
            let b = bellman_value(corner, dp.root, Sign::Plus)?.to_f64();
            let c = crate::constants::c_dyadic(eps)?.to_f64();
            let rel = ((b - c) / c).abs();
            out.push(CheckOutcome::new("bridge B+(0,eps^2) = C_d", rel < 1e-10, format!("rel err = {rel:.3e}")));
        }
        "extremal" => {
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let p = sample_point(rng, eps.min(0.95));
                let e = eps.min(0.95);
                for sign in [Sign::Plus, Sign::Minus] {
                    let phi = continuous_extremal(p, e, sign)?;
                    let m = phi.moments(0.0, 1.0)?;
                    let b = bellman_value(p, e, sign)?.to_f64();
                    worst = worst.max(((m.exp_mean.to_f64() - b) / b).abs());
                }
            }
            out.push(CheckOutcome::new(
                "continuous extremal attains B",
                worst < 1e-10,
                format!("max rel err = {worst:.3e}"),
            ));
            let (mut worst, mut worst_norm) = (0.0f64, 0.0f64);
            for _ in 0..10 {
                let p = sample_point(rng, eps);
                for sign in [Sign::Plus, Sign::Minus] {
                    let ex = dyadic_extremal(p, eps, sign, 40)?;
                    let m = ex.function.moments(0.0, 1.0)?;
                    let b = bellman_value(p, ex.delta, sign)?.to_f64();
                    worst = worst.max(((m.exp_mean.to_f64() - b) / b).abs());
                    if p.variance() > 0.0 {
                        worst_norm = worst_norm.max((bmo_norm_dyadic(&ex.function, 64) - eps).abs());
                    }
                }
            }
            out.push(CheckOutcome::new(
                "dyadic extremal attains B",
                worst < 1e-8,
                format!("max rel err = {worst:.3e}"),
            ));
            out.push(CheckOutcome::new(
                "dyadic extremal norm = eps",
                worst_norm < 1e-9,
                format!("max err = {worst_norm:.3e}"),
            ));
        }
        "scan" => {
            let rep = scan_constraint_set(dp.root, eps, Sign::Plus, 32)?;
            let corner = ScanReport::corner(dp.root, eps, Sign::Plus);
            let dist = rep.argument.iter().zip(corner).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            out.push(CheckOutcome::new(
                "scan at delta+",
                rep.extremum.abs() < 1e-6 && dist < 1e-3,
                format!("extremum = {:.3e}, distance to corner = {dist:.3e}", rep.extremum),
            ));
            let below = scan_constraint_set(dp.root - 0.01 * eps, eps, Sign::Plus, 32)?;
            out.push(CheckOutcome::new(
                "scan below delta+",
                below.extremum < 0.0 && (below.extremum - below.predicted).abs() < 1e-6,
                format!("extremum = {:.3e}, predicted = {:.3e}", below.extremum, below.predicted),
            ));
            let rep = scan_constraint_set(dm.root, eps, Sign::Minus, 32)?;
            out.push(CheckOutcome::new(
                "scan at delta-",
                rep.extremum.abs() < 1e-6,
                format!("extremum = {:.3e}", rep.extremum),
            ));
        }
        "slide" => {
            let tmax = eps / std::f64::consts::SQRT_2;
            for (sign, d) in [(Sign::Plus, dp.root), (Sign::Minus, dm.root)] {
                let s = sign.factor();
                let ext = (0..=400)
                    .map(|i| s * slide_profile(tmax * i as f64 / 400.0, d, eps, sign).unwrap())
                    .fold(f64::INFINITY, f64::min)
                    .min(0.0);
                let end = (s * slide_profile(tmax, d, eps, sign)?).min(0.0);
                out.push(CheckOutcome::new(
                    &format!("slide profile ({})", sign.name()),
                    (ext - end).abs() < 1e-8,
                    format!("grid extremum = {ext:.3e}, endpoint = {end:.3e}"),
                ));
            }
        }
        "midpoint" => {
            for (sign, d) in [(Sign::Plus, dp.root), (Sign::Minus, dm.root)] {
                let mut worst = f64::INFINITY;
                let mut done = 0;
                while done < 2000 {
                    let (xm, xp) = (sample_point(rng, eps), sample_point(rng, eps));
                    let x0 = 0.5 * (xm.x1() + xp.x1());
                    let v0 = 0.5 * (xm.variance() + xp.variance()) + 0.25 * (xp.x1() - xm.x1()).powi(2);
                    if v0 > eps * eps {
                        continue;
                    }
                    done += 1;
                    let mid = BellmanPoint::from_mean_variance(x0, v0)?;
                    let bv = |x| bellman_value(x, d, sign).map(|v| v.to_f64());
                    let gap = sign.factor() * (2.0 * bv(mid)? - bv(xm)? - bv(xp)?);
                    worst = worst.min(gap);
                }
                out.push(CheckOutcome::new(
                    &format!("midpoint concavity ({})", sign.name()),
                    worst >= -1e-10,
                    format!("min signed gap = {worst:.3e}"),
                ));
            }
        }
        "induction" => {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let scale = rng.random_range(0.2..=1.0);
                let f = sample_dyadic(rng, eps, 5, scale);
                for sign in [Sign::Plus, Sign::Minus] {
                    let chain = bellman_induction(&f, eps, sign, 5)?;
                    chain.verify(1e-12)?;
                    worst = worst.max(chain.worst_violation());
                }
            }
            out.push(CheckOutcome::new("random chains monotone", worst <= 1e-12, format!("worst step = {worst:.3e}")));
            let p = BellmanPoint::from_mean_variance(0.1, 0.6 * eps * eps)?;
            let ex = dyadic_extremal(p, eps, Sign::Plus, 40)?;
            let chain = bellman_induction(&ex.function, eps, Sign::Plus, 10)?;
            let step = chain.max_step();
            out.push(CheckOutcome::new("extremal chain flat", step < 1e-8, format!("max level change = {step:.3e}")));
        }
        "oracle" => {
            let p = BellmanPoint::from_mean_variance(0.0, eps * eps)?;
            let r = brute_force_oracle(p, eps, 4, 20_000, rng.random())?;
            out.push(CheckOutcome::new(
                "oracle below bound",
                r.best <= r.bound + 1e-9,
                format!("best = {:.12}, bound = {:.12}, ratio = {:.4}", r.best, r.bound, r.best / r.bound),
            ));
        }
        "split" => {
            let mut worst = f64::MIN;
            for _ in 0..100 {
                let phi = sample_log_ramp(rng, eps);
                let s = split_interval(&phi, eps, 1.1 * eps)?;
                let seg = crate::domain::segment_max_excess(s.x_minus, s.x_plus);
                worst = worst.max(seg - 1.21 * eps * eps);
            }
            out.push(CheckOutcome::new(
                "split stays in the wider strip",
                worst <= 1e-9,
                format!("max excess = {worst:.3e}"),
            ));
        }
        _ => unreachable!(),
    }
    Ok(out)
}
