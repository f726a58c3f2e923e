//! Sharp constants C(eps), C_d(eps) and the strip radii delta+-(eps).
//!
//! Run: cargo run --example sharp_constants

use jn_bellman::bellman::{bellman_value, Sign};
use jn_bellman::constants::{c_continuous, c_dyadic, delta_root, eps0_dyadic};
use jn_bellman::BellmanPoint;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    println!("dyadic blow-up at eps0 = sqrt(2)*ln 2 = {:.15}", eps0_dyadic());
    println!("{:>6} {:>18} {:>18} {:>18} {:>18}", "eps", "C(eps)", "C_d(eps)", "delta+", "delta-");
    for &eps in &[0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.97] {
        let plus = delta_root(eps, Sign::Plus)?;
        let minus = delta_root(eps, Sign::Minus)?;
        println!(
            "{eps:>6} {:>18.12} {:>18.12} {:>18.12} {:>18.12}",
            c_continuous(eps)?.to_f64(),
            c_dyadic(eps)?.to_f64(),
            plus.root,
            minus.root
        );
        // The dyadic constant is the plus Bellman function at the corner (0, eps^2).
        let corner = BellmanPoint::new(0.0, eps * eps)?;
        let b = bellman_value(corner, plus.root, Sign::Plus)?.to_f64();
        assert!((b / c_dyadic(eps)?.to_f64() - 1.0).abs() < 1e-10);
    }
    println!("C_d(0.99) = {}", c_dyadic(0.99)?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
