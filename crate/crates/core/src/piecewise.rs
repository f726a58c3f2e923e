//! Test functions on `(0, 1]` and their averages.
//!
//! Two families are supported:
//!
//! * [`PiecewiseFunction`]: finitely many segments, each constant or a
//!   logarithmic ramp `γ·ln(a/t) + b`. The continuous extremizers live here.
//! * [`DyadicStepFunction`]: a dyadic tree whose nodes are constants, splits,
//!   or infinite staircases. A staircase node on an interval `J` takes the
//!   value `first` on the right half of `J` and recurses on the left half with
//!   `first + step`, so the dyadic extremizers (which carry one staircase per
//!   dyadic block) have an exact finite description.
//!
//! All moments are closed-form; nothing here integrates numerically.

use serde::{Deserialize, Serialize};

use crate::constants::ExtendedValue;
use crate::error::{Error, Result};

/// Averages of `φ`, `φ²` and `e^φ` over an interval.
///
/// The variance is carried separately because `⟨φ²⟩ - ⟨φ⟩²` loses digits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple {
    pub mean: f64,
    pub variance: f64,
    pub exp_mean: ExtendedValue,
}

impl MomentTriple {
    /// `⟨φ²⟩`.
    pub fn second(&self) -> f64 {
        self.mean * self.mean + self.variance
    }
}

/// Anything with computable averages over subintervals of `(0, 1]`.
pub trait Moments {
    /// Averages over `(lo, hi]`, `0 ≤ lo < hi ≤ 1`.
    fn moments(&self, lo: f64, hi: f64) -> Result<MomentTriple>;

    /// `⟨e^φ⟩` over `(0, 1]`.
    fn exp_mean(&self) -> ExtendedValue {
        self.moments(0.0, 1.0).map(|m| m.exp_mean).unwrap_or(ExtendedValue::Infinite)
    }

    /// Value at `t ∈ (0, 1]`.
    fn eval(&self, t: f64) -> Result<f64>;
}

/// `moments(φ, lo, hi)`.
pub fn moments<F: Moments + ?Sized>(phi: &F, lo: f64, hi: f64) -> Result<MomentTriple> {
    phi.moments(lo, hi)
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo >= 0.0 && hi <= 1.0 && lo < hi) {
        return Err(Error::Domain(format!("interval ({lo}, {hi}] is not a subinterval of (0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Constant {
        value: f64,
    },
    /// `γ·ln(a/t) + b`, valid on segments inside `(0, a]`.
    LogRamp {
        gamma: f64,
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub shape: Shape,
}

/// Raw integrals `(∫φ, ∫φ², ∫e^φ)` over part of a segment.
#[derive(Debug, Clone, Copy, Default)]
struct Integrals {
    len: f64,
    f1: f64,
    f2: f64,
    fe: f64,
}

impl Integrals {
    fn add(&mut self, o: Integrals) {
        self.len += o.len;
        self.f1 += o.f1;
        self.f2 += o.f2;
        self.fe += o.fe;
    }
}

/// `∫_x^y s^{-γ} ds` for `0 ≤ x < y`, or `+∞`.
fn power_integral(x: f64, y: f64, gamma: f64) -> f64 {
    let u = 1.0 - gamma;
    if x == 0.0 && u <= 0.0 {
        return f64::INFINITY;
    }
    if u == 0.0 {
        return y.ln() - x.ln();
    }
    let ex = if x == 0.0 { -1.0 } else { (u * x.ln()).exp_m1() };
    ((u * y.ln()).exp_m1() - ex) / u
}

impl Shape {
    fn integrals(&self, c: f64, d: f64) -> Integrals {
        let len = d - c;
        match *self {
            Shape::Constant { value } => {
                Integrals { len, f1: value * len, f2: value * value * len, fe: value.exp() * len }
            }
            Shape::LogRamp { gamma, a, b } => {
                let tl = |t: f64| if t == 0.0 { 0.0 } else { t * (a / t).ln() };
                let tl2 = |t: f64| {
                    if t == 0.0 {
                        0.0
                    } else {
                        let l = (a / t).ln();
                        t * l * l
                    }
                };
                let f1 = (gamma + b) * len + gamma * (tl(d) - tl(c));
                let f2 = (2.0 * gamma * gamma + 2.0 * gamma * b + b * b) * len
                    + gamma * gamma * (tl2(d) - tl2(c))
                    + 2.0 * gamma * (b + gamma) * (tl(d) - tl(c));
                let fe = b.exp() * a * power_integral(c / a, d / a, gamma);
                Integrals { len, f1, f2, fe }
            }
        }
    }

    /// The same shape minus the constant `c`.
    fn shifted(&self, c: f64) -> Shape {
        match *self {
            Shape::Constant { value } => Shape::Constant { value: value - c },
            Shape::LogRamp { gamma, a, b } => Shape::LogRamp { gamma, a, b: b - c },
        }
    }

    fn value(&self, t: f64) -> f64 {
        match *self {
            Shape::Constant { value } => value,
            Shape::LogRamp { gamma, a, b } => gamma * (a / t).ln() + b,
        }
    }
}

/// A function on `(0, 1]` tiled by [`Segment`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRepr", into = "PiecewiseRepr")]
pub struct PiecewiseFunction {
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseRepr {
    #[serde(rename = "type")]
    kind: String,
    segments: Vec<Segment>,
}

impl TryFrom<PiecewiseRepr> for PiecewiseFunction {
    type Error = Error;
    fn try_from(r: PiecewiseRepr) -> Result<Self> {
        if r.kind != "piecewise" {
            return Err(Error::Parameter(format!("expected type \"piecewise\", got {:?}", r.kind)));
        }
        PiecewiseFunction::new(r.segments)
    }
}

impl From<PiecewiseFunction> for PiecewiseRepr {
    fn from(f: PiecewiseFunction) -> Self {
        PiecewiseRepr { kind: "piecewise".into(), segments: f.segments }
    }
}

impl PiecewiseFunction {
    /// Validates that the segments tile `(0, 1]` in order and that every
    /// ramp segment lies inside `(0, a]`.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Parameter("a piecewise function needs at least one segment".into()));
        }
        let mut at = 0.0;
        for s in &segments {
            if s.lo != at || s.hi.is_nan() || s.hi <= s.lo {
                return Err(Error::Parameter(format!(
                    "segments must tile (0,1] in order; got ({}, {}] after {at}",
                    s.lo, s.hi
                )));
            }
            match s.shape {
                Shape::Constant { value } if !value.is_finite() => {
                    return Err(Error::Parameter("constant segment value must be finite".into()));
                }
                Shape::LogRamp { gamma, a, b } if !(gamma.is_finite() && b.is_finite() && a > 0.0 && s.hi <= a) => {
                    return Err(Error::Parameter(format!(
                        "log ramp with a={a} does not cover its segment ({}, {}]",
                        s.lo, s.hi
                    )));
                }
                _ => {}
            }
            at = s.hi;
        }
        if at != 1.0 {
            return Err(Error::Parameter(format!("segments end at {at}, not at 1")));
        }
        Ok(PiecewiseFunction { segments })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![Segment { lo: 0.0, hi: 1.0, shape: Shape::Constant { value } }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn integrals(&self, lo: f64, hi: f64) -> Integrals {
        let mut acc = Integrals::default();
        for s in &self.segments {
            let (c, d) = (lo.max(s.lo), hi.min(s.hi));
            if c < d {
                acc.add(s.shape.integrals(c, d));
            }
        }
        acc
    }

    /// `(mean, variance)` over `(c, d]`. The variance is integrated around
    /// the mean to avoid cancellation.
    fn mean_variance(&self, c: f64, d: f64) -> (f64, f64) {
        let len = d - c;
        let mut f1 = 0.0;
        for s in &self.segments {
            let (lo, hi) = (c.max(s.lo), d.min(s.hi));
            if lo < hi {
                f1 += s.shape.integrals(lo, hi).f1;
            }
        }
        let m = f1 / len;
        let mut f2 = 0.0;
        for s in &self.segments {
            let (lo, hi) = (c.max(s.lo), d.min(s.hi));
            if lo < hi {
                f2 += s.shape.shifted(m).integrals(lo, hi).f2;
            }
        }
        (m, (f2 / len).max(0.0))
    }
}

impl Moments for PiecewiseFunction {
    fn moments(&self, lo: f64, hi: f64) -> Result<MomentTriple> {
        check_interval(lo, hi)?;
        let i = self.integrals(lo, hi);
        let (mean, variance) = self.mean_variance(lo, hi);
        Ok(MomentTriple { mean, variance, exp_mean: ExtendedValue::from_f64(i.fe / (hi - lo)) })
    }

    fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("t={t} is outside (0, 1]")));
        }
        let s = self.segments.iter().find(|s| t <= s.hi).unwrap_or(self.segments.last().unwrap());
        Ok(s.shape.value(t))
    }
}

const GRID: usize = 256;
const REFINE_ROUNDS: usize = 3;

/// Continuous BMO norm `sup_{(c,d]} (⟨φ²⟩ - ⟨φ⟩²)^{1/2}`.
///
/// A ramp segment starting at 0 contributes `|γ|` exactly (averages over
/// `(0, d]`, `d ≤ a`, are scale invariant). Everything else comes from a
/// `256²` grid over `(c, d)` refined three times around the best cell.
pub fn bmo_norm_continuous(phi: &PiecewiseFunction) -> Result<f64> {
    let ramps = phi.segments.iter().filter(|s| matches!(s.shape, Shape::LogRamp { .. })).count();
    if ramps > 1 {
        return Err(Error::Unsupported(format!("{ramps} log-ramp segments; at most one is supported")));
    }
    let mut best = 0.0f64;
    for s in &phi.segments {
        if let (0.0, Shape::LogRamp { gamma, .. }) = (s.lo, s.shape) {
            best = best.max(gamma * gamma);
        }
    }
    let (mut c_lo, mut c_hi, mut d_lo, mut d_hi) = (0.0, 1.0, 0.0, 1.0);
    let mut arg = (0.0, 1.0);
    for _ in 0..=REFINE_ROUNDS {
        let (hc, hd) = ((c_hi - c_lo) / GRID as f64, (d_hi - d_lo) / GRID as f64);
        let mut round_best = (f64::MIN, arg);
        for i in 0..=GRID {
            let c = c_lo + hc * i as f64;
            for j in 0..=GRID {
                let d = d_lo + hd * j as f64;
                if d - c <= 1e-15 {
                    continue;
                }
                let v = phi.mean_variance(c, d).1;
                if v > round_best.0 {
                    round_best = (v, (c, d));
                }
            }
        }
        if round_best.0 > best {
            best = round_best.0;
        }
        arg = round_best.1;
        c_lo = (arg.0 - 2.0 * hc).max(0.0);
        c_hi = (arg.0 + 2.0 * hc).min(1.0);
        d_lo = (arg.1 - 2.0 * hd).max(0.0);
        d_hi = (arg.1 + 2.0 * hd).min(1.0);
    }
    Ok(best.sqrt())
}

/// A node of a dyadic step function; see the module docs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DyadicNode {
    Constant { value: f64 },
    Staircase { first: f64, step: f64 },
    Split { left: Box<DyadicNode>, right: Box<DyadicNode> },
}

/// Lightweight view used for traversal: staircases and constants are
/// expanded lazily.
#[derive(Debug, Clone, Copy)]
enum View<'a> {
    Tree(&'a DyadicNode),
    Const(f64),
    Stair(f64, f64),
}

impl<'a> View<'a> {
    fn normalize(self) -> View<'a> {
        match self {
            View::Tree(DyadicNode::Constant { value }) => View::Const(*value),
            View::Tree(DyadicNode::Staircase { first, step }) => View::Stair(*first, *step),
            v => v,
        }
    }

    fn children(self) -> (View<'a>, View<'a>) {
        match self.normalize() {
            View::Const(v) => (View::Const(v), View::Const(v)),
            View::Stair(f, d) => (View::Stair(f + d, d), View::Const(f)),
            View::Tree(DyadicNode::Split { left, right }) => (View::Tree(left), View::Tree(right)),
            View::Tree(_) => unreachable!(),
        }
    }
}

/// Mean, variance and exponential mean of a node over its own interval.
#[derive(Debug, Clone, Copy)]
struct Stats {
    mean: f64,
    var: f64,
    exp: f64,
}

fn stats(v: View<'_>) -> Stats {
    match v.normalize() {
        View::Const(c) => Stats { mean: c, var: 0.0, exp: c.exp() },
        // Blocks of length 2^{-(j+1)} carry first + j·step, j = 0, 1, ...
        View::Stair(f, d) => {
            let q = d.exp();
            let exp = if q < 2.0 - 1e-15 { f.exp() / (2.0 - q) } else { f64::INFINITY };
            Stats { mean: f + d, var: 2.0 * d * d, exp }
        }
        View::Tree(DyadicNode::Split { left, right }) => combine(stats(View::Tree(left)), stats(View::Tree(right))),
        View::Tree(_) => unreachable!(),
    }
}

fn combine(l: Stats, r: Stats) -> Stats {
    let dm = l.mean - r.mean;
    Stats { mean: 0.5 * (l.mean + r.mean), var: 0.5 * (l.var + r.var) + 0.25 * dm * dm, exp: 0.5 * (l.exp + r.exp) }
}

impl From<Stats> for MomentTriple {
    fn from(s: Stats) -> Self {
        MomentTriple { mean: s.mean, variance: s.var.max(0.0), exp_mean: ExtendedValue::from_f64(s.exp) }
    }
}

/// A step function on `(0, 1]` built on the dyadic grid, possibly with
/// infinite staircases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DyadicRepr", into = "DyadicRepr")]
pub struct DyadicStepFunction {
    root: DyadicNode,
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    #[serde(rename = "type")]
    kind: String,
    root: DyadicNode,
}

impl TryFrom<DyadicRepr> for DyadicStepFunction {
    type Error = Error;
    fn try_from(r: DyadicRepr) -> Result<Self> {
        if r.kind != "dyadic" {
            return Err(Error::Parameter(format!("expected type \"dyadic\", got {:?}", r.kind)));
        }
        DyadicStepFunction::new(r.root)
    }
}

impl From<DyadicStepFunction> for DyadicRepr {
    fn from(f: DyadicStepFunction) -> Self {
        DyadicRepr { kind: "dyadic".into(), root: f.root }
    }
}

fn check_node(n: &DyadicNode) -> Result<()> {
    match n {
        DyadicNode::Constant { value } if !value.is_finite() => {
            Err(Error::Parameter("dyadic constant must be finite".into()))
        }
        DyadicNode::Staircase { first, step } if !(first.is_finite() && step.is_finite()) => {
            Err(Error::Parameter("staircase parameters must be finite".into()))
        }
        DyadicNode::Split { left, right } => {
            check_node(left)?;
            check_node(right)
        }
        _ => Ok(()),
    }
}

impl DyadicStepFunction {
    pub fn new(root: DyadicNode) -> Result<Self> {
        check_node(&root)?;
        Ok(DyadicStepFunction { root })
    }

    /// Step function with `2^K` leaf values, leaf `m` on `(m·2^{-K}, (m+1)·2^{-K}]`.
    pub fn from_leaves(leaves: &[f64]) -> Result<Self> {
        if leaves.is_empty() || !leaves.len().is_power_of_two() {
            return Err(Error::Parameter(format!("need 2^K leaves, got {}", leaves.len())));
        }
        fn build(v: &[f64]) -> DyadicNode {
            if v.len() == 1 {
                return DyadicNode::Constant { value: v[0] };
            }
            let (l, r) = v.split_at(v.len() / 2);
            DyadicNode::Split { left: Box::new(build(l)), right: Box::new(build(r)) }
        }
        Self::new(build(leaves))
    }

    /// The infinite staircase with value `first + k·step` on `(2^{-(k+1)}, 2^{-k}]`.
    pub fn staircase(first: f64, step: f64) -> Result<Self> {
        Self::new(DyadicNode::Staircase { first, step })
    }

    pub fn root(&self) -> &DyadicNode {
        &self.root
    }

    /// `shift + scale·φ`.
    pub fn affine(&self, shift: f64, scale: f64) -> Self {
        fn go(n: &DyadicNode, shift: f64, scale: f64) -> DyadicNode {
            match n {
                DyadicNode::Constant { value } => DyadicNode::Constant { value: shift + scale * value },
                DyadicNode::Staircase { first, step } => {
                    DyadicNode::Staircase { first: shift + scale * first, step: scale * step }
                }
                DyadicNode::Split { left, right } => DyadicNode::Split {
                    left: Box::new(go(left, shift, scale)),
                    right: Box::new(go(right, shift, scale)),
                },
            }
        }
        DyadicStepFunction { root: go(&self.root, shift, scale) }
    }

    /// Height of the explicit split structure.
    pub fn depth(&self) -> usize {
        fn go(n: &DyadicNode) -> usize {
            match n {
                DyadicNode::Split { left, right } => 1 + go(left).max(go(right)),
                _ => 0,
            }
        }
        go(&self.root)
    }

    pub fn has_staircase(&self) -> bool {
        fn go(n: &DyadicNode) -> bool {
            match n {
                DyadicNode::Staircase { .. } => true,
                DyadicNode::Split { left, right } => go(left) || go(right),
                DyadicNode::Constant { .. } => false,
            }
        }
        go(&self.root)
    }

    fn view_at(&self, n: u32, m: u64) -> View<'_> {
        let mut v = View::Tree(&self.root);
        for level in (0..n).rev() {
            let (l, r) = v.children();
            v = if (m >> level) & 1 == 0 { l } else { r };
        }
        v
    }

    /// Averages over the dyadic interval `(m·2^{-n}, (m+1)·2^{-n}]`.
    pub fn dyadic_moments(&self, n: u32, m: u64) -> Result<MomentTriple> {
        if n >= 63 || m >= (1u64 << n) {
            return Err(Error::Domain(format!("no dyadic interval with n={n}, m={m}")));
        }
        Ok(stats(self.view_at(n, m)).into())
    }

    /// Averages of every dyadic interval of generation `n`, left to right.
    pub fn level_moments(&self, n: u32) -> Result<Vec<MomentTriple>> {
        if n > 24 {
            return Err(Error::Parameter(format!("generation {n} is too deep to enumerate")));
        }
        let mut level = vec![View::Tree(&self.root)];
        for _ in 0..n {
            level = level
                .into_iter()
                .flat_map(|v| {
                    let (l, r) = v.children();
                    [l, r]
                })
                .collect();
        }
        Ok(level.into_iter().map(|v| stats(v).into()).collect())
    }
}

fn accumulate(v: View<'_>, l: f64, r: f64, lo: f64, hi: f64, acc: &mut Integrals) {
    if hi <= l || lo >= r {
        return;
    }
    let w = r - l;
    if lo <= l && hi >= r {
        let s = stats(v);
        acc.add(Integrals { len: w, f1: w * s.mean, f2: w * (s.var + s.mean * s.mean), fe: w * s.exp });
        return;
    }
    if let View::Const(c) = v.normalize() {
        let len = hi.min(r) - lo.max(l);
        acc.add(Integrals { len, f1: len * c, f2: len * c * c, fe: len * c.exp() });
        return;
    }
    let mid = l + 0.5 * w;
    let (a, b) = v.children();
    accumulate(a, l, mid, lo, hi, acc);
    accumulate(b, mid, r, lo, hi, acc);
}

impl Moments for DyadicStepFunction {
    fn moments(&self, lo: f64, hi: f64) -> Result<MomentTriple> {
        check_interval(lo, hi)?;
        if lo == 0.0 && hi == 1.0 {
            return Ok(stats(View::Tree(&self.root)).into());
        }
        let mut acc = Integrals::default();
        accumulate(View::Tree(&self.root), 0.0, 1.0, lo, hi, &mut acc);
        let len = hi - lo;
        let mean = acc.f1 / len;
        Ok(MomentTriple {
            mean,
            variance: (acc.f2 / len - mean * mean).max(0.0),
            exp_mean: ExtendedValue::from_f64(acc.fe / len),
        })
    }

    fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("t={t} is outside (0, 1]")));
        }
        let (mut l, mut r) = (0.0, 1.0);
        let mut v = View::Tree(&self.root);
        loop {
            if let View::Const(c) = v.normalize() {
                return Ok(c);
            }
            let mid = 0.5 * (l + r);
            let (a, b) = v.children();
            if t <= mid {
                v = a;
                r = mid;
            } else {
                v = b;
                l = mid;
            }
            if r - l < f64::MIN_POSITIVE {
                return Err(Error::Numerical(format!("staircase does not resolve at t={t}")));
            }
        }
    }
}

/// Dyadic BMO norm over dyadic intervals of generation at most `max_depth`.
///
/// Staircase nodes contribute their exact value `√2·|step|` at every
/// generation, so the result for functions with infinite staircases is not
/// truncated.
pub fn bmo_norm_dyadic(phi: &DyadicStepFunction, max_depth: u32) -> f64 {
    fn go(v: View<'_>, gen: u32, max_depth: u32) -> (Stats, f64) {
        match v.normalize() {
            View::Tree(DyadicNode::Split { left, right }) => {
                let (ls, lsup) = go(View::Tree(left), gen + 1, max_depth);
                let (rs, rsup) = go(View::Tree(right), gen + 1, max_depth);
                let s = combine(ls, rs);
                let kids = if gen < max_depth { lsup.max(rsup) } else { 0.0 };
                (s, s.var.max(kids))
            }
            other => {
                let s = stats(other);
                (s, s.var)
            }
        }
    }
    go(View::Tree(&phi.root), 0, max_depth).1.max(0.0).sqrt()
}

/// First `n` binary digits of `α ∈ [0, 1]` by exact doubling. `α = 1` gives
/// all ones.
pub fn dyadic_digits(alpha: f64, n: usize) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} is outside [0, 1]")));
    }
    let mut z = alpha;
    Ok((0..n)
        .map(|_| {
            z *= 2.0;
            if z >= 1.0 {
                z -= 1.0;
                1
            } else {
                0
            }
        })
        .collect())
}
