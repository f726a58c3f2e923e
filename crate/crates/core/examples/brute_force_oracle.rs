//! How close can finite-depth step functions get to the sharp bound?
//!
//! Run: cargo run --release --example brute_force_oracle

use jn_bellman::verify::brute_force_oracle;
use jn_bellman::BellmanPoint;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    let p = BellmanPoint::from_mean_variance(0.0, eps * eps)?;
    println!("p = (0, eps^2), eps = {eps}");
    for depth in 1..=5 {
        let r = brute_force_oracle(p, eps, depth, 40_000, 11)?;
        println!("  depth {depth}: best = {:.12}, bound = {:.12}, ratio = {:.5}", r.best, r.bound, r.best / r.bound);
        assert!(r.best <= r.bound + 1e-9);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
