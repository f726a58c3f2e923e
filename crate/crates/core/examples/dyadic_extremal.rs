//! Dyadic extremizers built from the binary digits of alpha.
//!
//! Run: cargo run --example dyadic_extremal

use jn_bellman::bellman::{bellman_value, Sign};
use jn_bellman::extremal::{dyadic_base, dyadic_extremal, perspective2_digits};
use jn_bellman::piecewise::{bmo_norm_dyadic, dyadic_digits};
use jn_bellman::{BellmanPoint, Moments};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    let base = dyadic_base(eps, 6)?;
    let m = base.moments(0.0, 1.0)?;
    println!("phi0: <phi> = {:.3e}, var = {:.12}, <e^phi> = {}", m.mean, m.variance, m.exp_mean);
    for n in 0..4 {
        let mn = base.dyadic_moments(n, 0)?;
        println!("  on (0, 2^-{n}]: mean = {:.12}, second = {:.12}", mn.mean, mn.second());
    }

    let p = BellmanPoint::from_mean_variance(0.1, 0.13)?;
    for sign in [Sign::Plus, Sign::Minus] {
        let ex = dyadic_extremal(p, eps, sign, 40)?;
        let m = ex.function.moments(0.0, 1.0)?;
        let b = bellman_value(p, ex.delta, sign)?.to_f64();
        println!("\n{} extremizer at x = (0.1, {:.2}), delta = {:.15}", sign.name(), p.x2(), ex.delta);
        println!("  alpha = {:.15}, beta = {:.12}, gamma = {:.12}", ex.params.alpha, ex.params.beta, ex.params.gamma);
        println!("  first digits: {:?}", &ex.digits[..16]);
        println!(
            "  <phi> = {:.12}, <phi^2> = {:.12}, <e^phi> = {:.12}, B = {b:.12}",
            m.mean,
            m.second(),
            m.exp_mean.to_f64()
        );
        println!(
            "  dyadic norm = {:.15}, truncation bound = {:.2e}",
            bmo_norm_dyadic(&ex.function, 64),
            ex.truncation_bound
        );
        let geo = perspective2_digits(p, eps, ex.delta, 30)?;
        assert_eq!(geo, dyadic_digits(ex.params.alpha, 30)?);
    }
    println!("\ngeometric digit construction agrees with the binary expansion");
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
