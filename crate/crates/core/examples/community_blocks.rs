//! Affinity blocks for a degree sequence: block sizes, connectivity and
//! the excess degree left for the second phase.

use std::error::Error;

use bter::degree::synthesize_powerlaw;
use bter::{CommunityPartition, ConnectivityFormula};

pub fn run() -> Result<(), Box<dyn Error>> {
    let degrees = synthesize_powerlaw(1_000, 2.0, 30)?;
    for formula in [ConnectivityFormula::standard(0.95, 0.05)?, ConnectivityFormula::cubic()] {
        let part = CommunityPartition::new(&degrees, &formula);
        println!("{:?}: {} blocks", formula.variant, part.blocks.len());
        println!("{:>6} {:>5} {:>6} {:>8}", "start", "size", "bar_d", "rho");
        for (b, rho) in part.blocks.iter().zip(&part.rho).step_by(8) {
            println!("{:>6} {:>5} {:>6} {:>8.4}", b.start, b.len, b.bar_d, rho);
        }
        let excess: f64 = part.excess.iter().sum();
        println!("excess degree {excess:.1} of {}", degrees.total());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
