//! The Bellman functions B+-, their derivatives and the profile ODE.
//!
//! Run: cargo run --example bellman_surface

use jn_bellman::bellman::{bellman_derivatives, bellman_value, ode_residual, quadratic_form, Sign};
use jn_bellman::BellmanPoint;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let delta = 0.5;
    println!("B+-_delta on the strip, delta = {delta}");
    for &x1 in &[-0.5, 0.0, 0.5] {
        for &frac in &[0.0, 0.5, 1.0] {
            let p = BellmanPoint::new(x1, x1 * x1 + frac * delta * delta)?;
            let bp = bellman_value(p, delta, Sign::Plus)?;
            let bm = bellman_value(p, delta, Sign::Minus)?;
            println!("  x = ({x1:5.2}, {:6.4})  B+ = {bp:<20}  B- = {bm}", p.x2());
        }
    }

    let p = BellmanPoint::new(0.1, 0.01 + 0.1)?;
    let d = bellman_derivatives(p, delta, Sign::Plus)?;
    println!("\nat x = (0.1, 0.11):");
    println!("  grad = [{:.12}, {:.12}]", d.grad[0], d.grad[1]);
    println!("  hess = {:?}", d.hess);
    println!("  det(hess) = {:.3e} (degenerate along the tangent direction)", d.hessian_det());
    for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
        println!("  -d^T hess d for d = {dir:?}: {:.12}", quadratic_form(p, dir, delta, Sign::Plus)?);
    }

    println!("\nprofile ODE residuals (h = 1e-4):");
    for sign in [Sign::Plus, Sign::Minus] {
        for &t in &[0.05, 0.1, 0.15] {
            println!("  {:5} t = {t:4}: {:+.3e}", sign.name(), ode_residual(t, delta, sign, 1e-4)?);
        }
    }

    let above = BellmanPoint::new(0.0, 0.5)?;
    println!("\nB+ with delta = 1 above the bottom: {}", bellman_value(above, 1.0, Sign::Plus)?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
