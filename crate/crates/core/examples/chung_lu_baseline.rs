//! The Chung-Lu baseline: exact per-pair sampling against the skip sampler,
//! and realized degrees against their targets.

use std::error::Error;

use bter::degree::synthesize_powerlaw;
use bter::generator::{generate_cl_with, ClMode};

pub fn run() -> Result<(), Box<dyn Error>> {
    let degrees = synthesize_powerlaw(800, 2.2, 40)?;
    let runs = 40;
    let mut mean = [vec![0.0f64; degrees.len()], vec![0.0f64; degrees.len()]];
    for seed in 0..runs {
        for (slot, mode) in [ClMode::Exact, ClMode::Fast].into_iter().enumerate() {
            let g = generate_cl_with(&degrees, seed, mode)?;
            for (acc, d) in mean[slot].iter_mut().zip(g.degrees()) {
                *acc += d as f64 / runs as f64;
            }
        }
    }
    println!("{:>6} {:>6} {:>10} {:>10}", "target", "nodes", "exact", "fast");
    let seq = degrees.as_slice();
    let mut start = 0;
    while start < seq.len() {
        let d = seq[start];
        let end = start + seq[start..].iter().take_while(|&&x| x == d).count();
        let avg = |v: &[f64]| v[start..end].iter().sum::<f64>() / (end - start) as f64;
        if end - start >= 5 || end == seq.len() {
            println!(
                "{d:>6} {:>6} {:>10.3} {:>10.3}",
                end - start,
                avg(&mean[0]),
                avg(&mean[1])
            );
        }
        start = end;
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
