//! Grid search of the midpoint inequality over its constraint set, and the
//! one-parameter profile along the boundary slide.
//!
//! Run: cargo run --release --example two_stage_scan

use jn_bellman::bellman::Sign;
use jn_bellman::constants::delta_root;
use jn_bellman::verify::{scan_constraint_set, slide_profile, ScanReport};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    for sign in [Sign::Plus, Sign::Minus] {
        let root = delta_root(eps, sign)?.root;
        println!("{}: delta = {root:.15}", sign.name());
        for delta in [root - 0.01, root, 3.0 * eps / (2.0 * std::f64::consts::SQRT_2)] {
            let r = scan_constraint_set(delta, eps, sign, 48)?;
            println!(
                "  delta = {delta:.6}: extremum = {:+.3e} (predicted {:+.3e}) at {:.6?}",
                r.extremum, r.predicted, r.argument
            );
        }
        println!("  corner = {:.6?}", ScanReport::corner(root, eps, sign));
        let tmax = eps / std::f64::consts::SQRT_2;
        let profile: Vec<String> = (0..=8)
            .map(|i| slide_profile(tmax * i as f64 / 8.0, root, eps, sign).map(|v| format!("{v:+.2e}")))
            .collect::<Result<_, _>>()?;
        println!("  slide profile: {}", profile.join(" "));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
