//! Bellman induction: averaging B over finer and finer dyadic partitions.
//!
//! Run: cargo run --example bellman_induction

use jn_bellman::bellman::Sign;
use jn_bellman::extremal::dyadic_extremal;
use jn_bellman::piecewise::DyadicStepFunction;
use jn_bellman::verify::{bellman_induction, sample_dyadic};
use jn_bellman::BellmanPoint;
use rand::SeedableRng;

fn show(label: &str, f: &DyadicStepFunction, eps: f64, sign: Sign, depth: u32) -> Result<(), jn_bellman::Error> {
    let chain = bellman_induction(f, eps, sign, depth)?;
    chain.verify(1e-12)?;
    let values: Vec<String> = chain.levels.iter().map(|l| format!("{:.10}", l.value)).collect();
    println!("{label} ({}):", sign.name());
    println!("  levels: {}", values.join(" "));
    println!("  <e^phi> = {:.10}", chain.target);
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.5;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let f = sample_dyadic(&mut rng, eps, 4, 1.0);
    show("random depth-4 function", &f, eps, Sign::Plus, 4)?;
    show("random depth-4 function", &f, eps, Sign::Minus, 4)?;
    let p = BellmanPoint::from_mean_variance(0.0, 0.2)?;
    let ex = dyadic_extremal(p, eps, Sign::Plus, 40)?;
    show("extremizer (flat chain)", &ex.function, eps, Sign::Plus, 8)?;
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
