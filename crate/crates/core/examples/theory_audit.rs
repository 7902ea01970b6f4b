//! Theory side: Chung-Lu expected triangles, the Kruskal-Katona bound,
//! the per-community criterion and the predicted community-size profile.

use std::error::Error;

use bter::degree::synthesize_powerlaw;
use bter::generator::{generate_bter, GenerationConfig};
use bter::metrics::count_triangles_wedges;
use bter::theory::{audit_community, cl_expected_triangles, kruskal_katona_check, predict_community_profile};
use bter::{CommunityPartition, ConnectivityFormula};

pub fn run() -> Result<(), Box<dyn Error>> {
    let weights: Vec<f64> = synthesize_powerlaw(300, 2.0, 25)?
        .as_slice()
        .iter()
        .map(|&d| d as f64)
        .collect();
    let est = cl_expected_triangles(&weights)?;
    println!("chung-lu expected triangles: {:.2} (exact: {})", est.value, est.exact);

    let degrees = synthesize_powerlaw(2_000, 2.0, 40)?;
    let formula = ConnectivityFormula::standard(0.95, 0.05)?;
    let (g, _) = generate_bter(&degrees, &GenerationConfig::new(3, formula))?;
    let t = count_triangles_wedges(&g).triangles;
    let m = g.edge_count() as u64;
    println!(
        "kruskal-katona: t = {t}, m = {m}, holds = {}",
        kruskal_katona_check(t, m)
    );

    let part = CommunityPartition::new(&degrees, &formula);
    let mut passing = 0;
    for block in &part.blocks {
        let members = block.nodes();
        let internal: Vec<u64> = members
            .clone()
            .map(|u| g.neighbors(u).iter().filter(|v| members.contains(v)).count() as u64)
            .filter(|&d| d > 0)
            .collect();
        if internal.iter().sum::<u64>() >= 2 {
            passing += audit_community(&internal, 0.1)?.passes as usize;
        }
    }
    println!(
        "blocks meeting the community criterion: {passing} of {}",
        part.blocks.len()
    );

    let profile = predict_community_profile(1_000_000, 2.0)?;
    println!(
        "predicted largest community for n = 1e6, gamma = 2: {}",
        profile.max_size
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
