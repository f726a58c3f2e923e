//! Splitting (0,1] so the segment between the two halves' averages stays in
//! a slightly wider strip.
//!
//! Run: cargo run --example interval_split

use jn_bellman::domain::{segment_max_excess, split_interval};
use jn_bellman::piecewise::{PiecewiseFunction, Segment, Shape};

fn ramp(gamma: f64, a: f64, b: f64) -> Result<PiecewiseFunction, jn_bellman::Error> {
    let mut segs = vec![Segment { lo: 0.0, hi: a, shape: Shape::LogRamp { gamma, a, b } }];
    if a < 1.0 {
        segs.push(Segment { lo: a, hi: 1.0, shape: Shape::Constant { value: b } });
    }
    PiecewiseFunction::new(segs)
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    for &ratio in &[1.01, 1.02, 1.05, 1.5] {
        let eps1 = ratio * eps;
        println!("eps1 = {ratio} * eps");
        for &a in &[0.3, 0.55, 0.9] {
            for &gamma in &[eps, -eps] {
                let phi = ramp(gamma, a, 0.0)?;
                let s = split_interval(&phi, eps, eps1)?;
                let excess = segment_max_excess(s.x_minus, s.x_plus);
                println!(
                    "  a = {a:4}, gamma = {gamma:+}: alpha+ = {:.12}, tangency = {:5}, max excess = {:.9} (cap {:.9})",
                    s.alpha_plus,
                    s.tangency,
                    excess,
                    eps1 * eps1
                );
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
