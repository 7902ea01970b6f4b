//! Leading adjacency eigenvalues of a generated graph, with residuals.

use std::error::Error;

use bter::degree::synthesize_powerlaw;
use bter::generator::{generate_bter, generate_cl, GenerationConfig};
use bter::metrics::top_eigenvalues;
use bter::ConnectivityFormula;

pub fn run() -> Result<(), Box<dyn Error>> {
    let degrees = synthesize_powerlaw(2_000, 2.0, 50)?;
    let cfg = GenerationConfig::new(5, ConnectivityFormula::standard(0.95, 0.05)?);
    let (bter, _) = generate_bter(&degrees, &cfg)?;
    let cl = generate_cl(&degrees, 5)?;
    let a = top_eigenvalues(&bter, 10, 1e-8)?;
    let b = top_eigenvalues(&cl, 10, 1e-8)?;
    println!("Krylov basis: bter {}, chung-lu {}", a.iterations, b.iterations);
    println!("{:>4} {:>12} {:>10} {:>12}", "rank", "bter", "residual", "chung-lu");
    for i in 0..a.k {
        println!(
            "{:>4} {:>12.6} {:>10.2e} {:>12.6}",
            i + 1,
            a.eigenvalues[i],
            a.residuals[i],
            b.eigenvalues[i]
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
