//! Conjectured dyadic constants in R^n (only n = 1 is proven).
//!
//! Run: cargo run --example conjectured_dimensions

use jn_bellman::constants::{c_dyadic, conjectured_nd};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.2;
    println!("eps = {eps}");
    for n in 1..=6 {
        let c = conjectured_nd(eps, n)?;
        let tag = if c.conjectural { " [conjectural]" } else { "" };
        println!(
            "  n = {n}: C = {:<20} eps0 = {:.12}  delta+ = {:?}  delta- = {:?}{tag}",
            c.c_nd.to_string(),
            c.eps0_nd,
            c.delta_plus_nd,
            c.delta_minus_nd
        );
    }
    let line = conjectured_nd(eps, 1)?;
    assert_eq!(line.c_nd.to_f64(), c_dyadic(eps)?.to_f64());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
