//! Seeded statistical checks of the samplers. Each assertion is a 3-sigma
//! test on fixed seeds, so outcomes are reproducible.

use bter::degree::synthesize_powerlaw;
use bter::generator::{generate_bter, generate_cl, generate_cl_with, ClMode, GenerationConfig};
use bter::metrics::{clustering_profile, count_triangles_wedges};
use bter::theory::cl_expected_triangles;
use bter::{ConnectivityFormula, DegreeSequence};

fn config(seed: u64, rho: f64, eta: f64) -> GenerationConfig {
    GenerationConfig::new(seed, ConnectivityFormula::standard(rho, eta).unwrap())
}

/// Index ranges of equal target degree in a sorted sequence.
fn degree_runs(seq: &[usize]) -> Vec<(usize, std::ops::Range<usize>)> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start < seq.len() {
        let d = seq[start];
        let end = start + seq[start..].iter().take_while(|&&x| x == d).count();
        runs.push((d, start..end));
        start = end;
    }
    runs
}

#[test]
fn realized_degrees_track_targets_per_bucket() {
    let degrees = synthesize_powerlaw(10_000, 2.0, 100).unwrap();
    let seeds = 50;
    let mut bter_mean = vec![0.0; degrees.len()];
    let mut cl_mean = vec![0.0; degrees.len()];
    for seed in 0..seeds {
        let (b, _) = generate_bter(&degrees, &config(seed, 0.95, 0.05)).unwrap();
        let c = generate_cl(&degrees, seed).unwrap();
        for (acc, d) in bter_mean.iter_mut().zip(b.degrees()) {
            *acc += d as f64 / seeds as f64;
        }
        for (acc, d) in cl_mean.iter_mut().zip(c.degrees()) {
            *acc += d as f64 / seeds as f64;
        }
    }
    let mut checked = 0;
    for (d, range) in degree_runs(degrees.as_slice()) {
        if range.len() < 50 {
            continue;
        }
        checked += 1;
        for (name, mean) in [("bter", &bter_mean), ("chung-lu", &cl_mean)] {
            let avg = mean[range.clone()].iter().sum::<f64>() / range.len() as f64;
            assert!(
                (avg - d as f64).abs() <= 0.1 * d as f64,
                "{name}: degree {d} realized {avg:.3}"
            );
        }
    }
    assert!(checked >= 5);
}

const BUCKETS: [usize; 7] = [2, 4, 8, 16, 32, 64, 128];

/// Mean local clustering per logarithmic degree bucket, one row per seed
/// whose buckets all hold at least `floor` nodes.
fn bucket_means(rho: f64, eta: f64, seeds: u64, floor: usize) -> Vec<Vec<f64>> {
    let degrees = synthesize_powerlaw(10_000, 2.0, 100).unwrap();
    let mut means = Vec::new();
    for seed in 0..seeds {
        let (g, _) = generate_bter(&degrees, &config(seed, rho, eta)).unwrap();
        let profile = clustering_profile(&g);
        let mut sums = vec![(0.0, 0usize); BUCKETS.len() - 1];
        for (u, cc) in profile.per_node.iter().enumerate() {
            let (Some(cc), d) = (cc, g.degree(u)) else { continue };
            if let Some(b) = BUCKETS.windows(2).position(|w| (w[0]..w[1]).contains(&d)) {
                sums[b].0 += cc;
                sums[b].1 += 1;
            }
        }
        if sums.iter().all(|s| s.1 >= floor) {
            means.push(sums.iter().map(|s| s.0 / s.1 as f64).collect());
        }
    }
    means
}

/// Mean and standard error of `later - earlier` bucket means across seeds.
fn bucket_step(means: &[Vec<f64>], earlier: usize, later: usize) -> (f64, f64) {
    let runs = means.len() as f64;
    let diffs: Vec<f64> = means.iter().map(|m| m[later] - m[earlier]).collect();
    let mean = diffs.iter().sum::<f64>() / runs;
    let var = diffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1.0);
    (mean, (var / runs).sqrt())
}

#[test]
fn clustering_is_non_increasing_across_degree_buckets() {
    for (rho, eta) in [(0.95, 0.95), (0.7, 1.25)] {
        let means = bucket_means(rho, eta, 60, 20);
        assert!(means.len() >= 50, "bucket floor met on only {} seeds", means.len());
        for b in 1..BUCKETS.len() - 1 {
            let (rise, se) = bucket_step(&means, b - 1, b);
            assert!(
                rise <= 3.0 * se,
                "rho {rho} eta {eta}: bucket {b} rises by {rise:.4} (se {se:.4})"
            );
        }
    }
}

#[test]
fn clustering_falls_from_small_to_large_degree_at_weak_decay() {
    // With eta = 0.05 block density is nearly flat and the profile rises
    // slightly up to degree 16: realized small degrees mix in lower targets
    // that gained an excess edge. Past that peak it falls.
    let means = bucket_means(0.95, 0.05, 60, 20);
    assert!(means.len() >= 50);
    let last = BUCKETS.len() - 2;
    let (fall, se) = bucket_step(&means, 0, last);
    assert!(fall < -3.0 * se, "largest bucket changes by {fall:.4} (se {se:.4})");
    for b in 3..=last {
        let (rise, se) = bucket_step(&means, b - 1, b);
        assert!(rise <= 3.0 * se, "bucket {b} rises by {rise:.4} (se {se:.4})");
    }
}

#[test]
fn bter_out_clusters_chung_lu() {
    let degrees = synthesize_powerlaw(5_000, 2.0, 70).unwrap();
    for seed in 0..10 {
        for (rho, eta) in [(0.95, 0.05), (0.7, 1.25), (0.95, 0.95)] {
            let (b, _) = generate_bter(&degrees, &config(seed, rho, eta)).unwrap();
            let c = generate_cl(&degrees, seed).unwrap();
            assert!(clustering_profile(&b).global_c > clustering_profile(&c).global_c);
        }
    }
}

#[test]
fn fast_chung_lu_matches_exact_pair_frequencies() {
    let degrees = DegreeSequence::new(vec![
        1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 5, 6, 7, 8, 9, 11, 14,
    ])
    .unwrap();
    let n = degrees.len();
    let seeds = 100_000u64;
    let mut counts = [vec![0u32; n * n], vec![0u32; n * n]];
    for seed in 0..seeds {
        for (slot, mode) in [ClMode::Exact, ClMode::Fast].into_iter().enumerate() {
            let g = generate_cl_with(&degrees, seed, mode).unwrap();
            for (u, v) in g.edges() {
                counts[slot][u * n + v] += 1;
            }
        }
    }
    let total: f64 = degrees.total() as f64;
    let mut chi2 = 0.0;
    let mut pairs = 0usize;
    for u in 0..n {
        for v in u + 1..n {
            let p = (degrees.as_slice()[u] * degrees.as_slice()[v]) as f64 / total;
            let (a, b) = (
                counts[0][u * n + v] as f64 / seeds as f64,
                counts[1][u * n + v] as f64 / seeds as f64,
            );
            if p >= 1.0 {
                assert_eq!((a, b), (1.0, 1.0));
                continue;
            }
            let sigma = (2.0 * p * (1.0 - p) / seeds as f64).sqrt();
            chi2 += ((a - b) / sigma).powi(2);
            pairs += 1;
        }
    }
    // Sum of squared z-scores is chi-square with `pairs` degrees of freedom.
    let k = pairs as f64;
    assert!(
        (chi2 - k).abs() <= 3.0 * (2.0 * k).sqrt(),
        "chi2 {chi2:.1} on {pairs} pairs"
    );
}

#[test]
fn expected_triangles_match_monte_carlo_for_larger_sequences() {
    let samples = 100_000u64;
    for seq in [vec![2, 3, 3, 4, 4, 5, 5, 6, 7], vec![1, 2, 2, 3, 3, 4, 6, 6, 8, 9]] {
        let seq = DegreeSequence::new(seq).unwrap();
        let weights: Vec<f64> = seq.as_slice().iter().map(|&d| d as f64).collect();
        let expected = cl_expected_triangles(&weights).unwrap();
        assert!(expected.exact);
        let (mut sum, mut sq) = (0.0, 0.0);
        for seed in 0..samples {
            let t = count_triangles_wedges(&generate_cl_with(&seq, seed, ClMode::Exact).unwrap()).triangles as f64;
            sum += t;
            sq += t * t;
        }
        let mean = sum / samples as f64;
        let se = ((sq / samples as f64 - mean * mean) / samples as f64).sqrt();
        assert!(
            (mean - expected.value).abs() <= 3.0 * se,
            "mean {mean} vs {} (se {se})",
            expected.value
        );
    }
}
