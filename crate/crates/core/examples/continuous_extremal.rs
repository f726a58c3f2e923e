//! Logarithmic extremizers for the continuous Bellman functions.
//!
//! Run: cargo run --example continuous_extremal

use jn_bellman::bellman::{bellman_value, Sign};
use jn_bellman::extremal::continuous_extremal;
use jn_bellman::piecewise::bmo_norm_continuous;
use jn_bellman::{BellmanPoint, Moments};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    for &(x1, var) in &[(0.0, 0.25), (0.3, 0.1), (-0.2, 0.0)] {
        let p = BellmanPoint::from_mean_variance(x1, var)?;
        for sign in [Sign::Plus, Sign::Minus] {
            let phi = continuous_extremal(p, eps, sign)?;
            let m = phi.moments(0.0, 1.0)?;
            let b = bellman_value(p, eps, sign)?;
            println!("x = ({x1}, {:.4}), {}:", p.x2(), sign.name());
            for s in phi.segments() {
                println!("    ({:.6}, {:.6}]  {:?}", s.lo, s.hi, s.shape);
            }
            println!(
                "    <phi> = {:.12}  <phi^2> = {:.12}  <e^phi> = {}  B = {}  norm = {:.9}",
                m.mean,
                m.second(),
                m.exp_mean,
                b,
                bmo_norm_continuous(&phi)?
            );
        }
    }
    let phi = continuous_extremal(BellmanPoint::new(0.0, 0.25)?, eps, Sign::Plus)?;
    println!("\nJSON: {}", serde_json::to_string(&phi)?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
