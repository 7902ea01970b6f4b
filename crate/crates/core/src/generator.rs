//! Graph samplers: Erdős–Rényi, Chung–Lu and BTER.
//!
//! All samplers are deterministic functions of their inputs and seed. Work
//! is split into independent units (an ER block, a Chung–Lu row, a chunk of
//! interconnect draws), each with its own [`rng::stream`], so the output
//! does not depend on how many threads run them.

use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::community::{CommunityPartition, ConnectivityFormula};
use crate::degree::DegreeSequence;
use crate::graph::{build_graph_with_nodes, EdgeStreamStats, Graph};
use crate::nint;
use crate::rng::{stream, Phase};

/// Sequences up to this length use per-pair Bernoulli trials in
/// [`ClMode::Auto`].
pub const CL_EXACT_THRESHOLD: usize = 1000;

const DRAW_CHUNK: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("edge probability must lie in [0, 1], got {0}")]
    Probability(f64),
    #[error("Chung-Lu needs a degree total of at least 2, got {0}")]
    TooFewStubs(usize),
}

type Edge = (usize, usize);

/// Appends the edges of G(n, p) on nodes `offset..offset + n`, visiting
/// pairs in lexicographic order with geometric skips.
fn er_edges<R: Rng>(offset: usize, n: usize, p: f64, rng: &mut R, out: &mut Vec<Edge>) {
    if n < 2 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            out.extend((0..v).map(|w| (offset + w, offset + v)));
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if skip >= (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            out.push((offset + w as usize, offset + v));
        }
    }
}

/// Erdős–Rényi graph: every pair present independently with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph, GeneratorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeneratorError::Probability(p));
    }
    let mut edges = Vec::new();
    er_edges(0, n, p, &mut stream(seed, Phase::ErdosRenyi, 0), &mut edges);
    Ok(build_graph_with_nodes(n, edges).0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClMode {
    /// Exact for short sequences, fast otherwise.
    #[default]
    Auto,
    /// One Bernoulli trial per pair; quadratic.
    Exact,
    /// Edge skipping over weight-sorted rows; linear in nodes plus edges.
    Fast,
}

/// Chung–Lu graph: pair `(i, j)` present independently with probability
/// `min(1, d_i d_j / sum(d))`.
pub fn generate_cl(degrees: &DegreeSequence, seed: u64) -> Result<Graph, GeneratorError> {
    generate_cl_with(degrees, seed, ClMode::Auto)
}

pub fn generate_cl_with(degrees: &DegreeSequence, seed: u64, mode: ClMode) -> Result<Graph, GeneratorError> {
    let total = degrees.total();
    if total < 2 {
        return Err(GeneratorError::TooFewStubs(total));
    }
    let d = degrees.as_slice();
    let n = d.len();
    let s = total as f64;
    let exact = match mode {
        ClMode::Exact => true,
        ClMode::Fast => false,
        ClMode::Auto => n <= CL_EXACT_THRESHOLD,
    };
    let rows: Vec<Vec<Edge>> = if exact {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, Phase::ChungLu, i as u64);
                let di = d[i] as f64;
                (i + 1..n)
                    .filter(|&j| rng.random::<f64>() < (di * d[j] as f64 / s).min(1.0))
                    .map(|j| (i, j))
                    .collect()
            })
            .collect()
    } else {
        // Rows in descending weight order, so probabilities only shrink
        // along a row. `rank` a maps to node n - 1 - a.
        let w = |a: usize| d[n - 1 - a] as f64;
        (0..n)
            .into_par_iter()
            .map(|a| {
                let mut rng = stream(seed, Phase::ChungLu, a as u64);
                let mut row = Vec::new();
                let mut b = a + 1;
                if b >= n {
                    return row;
                }
                let mut p = (w(a) * w(b) / s).min(1.0);
                while b < n && p > 0.0 {
                    if p < 1.0 {
                        let r: f64 = rng.random();
                        let skip = ((1.0 - r).ln() / (1.0 - p).ln()).floor();
                        if b as f64 + skip >= n as f64 {
                            break;
                        }
                        b += skip as usize;
                    }
                    let q = (w(a) * w(b) / s).min(1.0);
                    if rng.random::<f64>() < q / p {
                        row.push((n - 1 - b, n - 1 - a));
                    }
                    p = q;
                    b += 1;
                }
                row
            })
            .collect()
    };
    Ok(build_graph_with_nodes(n, rows.into_iter().flatten()).0)
}

/// BTER model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationConfig {
    pub seed: u64,
    pub connectivity: ConnectivityFormula,
    /// Fraction of degree-1 nodes wired by hand instead of through Chung–Lu.
    pub manual_fraction: f64,
    /// Chung–Lu weight of the remaining degree-1 nodes.
    pub d1_weight: f64,
    /// Number of hand-wired degree-1 nodes paired with each other; `None`
    /// uses the Chung–Lu expectation.
    pub q_override: Option<usize>,
    /// Extra interconnect proportion compensating for discarded repeats.
    pub beta: f64,
}

impl GenerationConfig {
    pub fn new(seed: u64, connectivity: ConnectivityFormula) -> Self {
        GenerationConfig {
            seed,
            connectivity,
            manual_fraction: 0.75,
            d1_weight: 1.10,
            q_override: None,
            beta: 0.10,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: String| Err(GeneratorError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.manual_fraction) {
            return bad(format!(
                "manual_fraction must be in [0, 1], got {}",
                self.manual_fraction
            ));
        }
        if !(self.d1_weight > 0.0 && self.d1_weight.is_finite()) {
            return bad(format!("d1_weight must be positive, got {}", self.d1_weight));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be non-negative, got {}", self.beta));
        }
        if let Some(q) = self.q_override {
            if q % 2 != 0 {
                return bad(format!("q must be even, got {q}"));
            }
        }
        Ok(())
    }
}

/// Edge counts of one generation phase. `kept` counts the edges of the
/// final graph first produced by this phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounts {
    pub raw: usize,
    pub kept: usize,
}

/// Record of a BTER run.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTrace {
    pub blocks: PhaseCounts,
    pub pairing: PhaseCounts,
    pub attach: PhaseCounts,
    pub interconnect: PhaseCounts,
    pub stats: EdgeStreamStats,
    /// Degree-1 node count `r`.
    pub degree_one: usize,
    /// Hand-wired degree-1 nodes `p`.
    pub manual: usize,
    /// Hand-wired degree-1 nodes paired among themselves `q`.
    pub paired: usize,
    /// Interconnect weight total before scaling.
    pub excess_total: f64,
    /// Scale factor applied to the interconnect weights.
    pub eta_scale: f64,
    /// Interconnect draws, `nint(scaled total / 2)`.
    pub interconnect_draws: usize,
}

impl PhaseTrace {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "quantity,value")?;
        for (name, c) in [
            ("blocks", self.blocks),
            ("pairing", self.pairing),
            ("attach", self.attach),
            ("interconnect", self.interconnect),
        ] {
            writeln!(out, "{name}_raw,{}", c.raw)?;
            writeln!(out, "{name}_kept,{}", c.kept)?;
        }
        writeln!(out, "raw_edges,{}", self.stats.raw_edges)?;
        writeln!(out, "self_loops_dropped,{}", self.stats.self_loops_dropped)?;
        writeln!(out, "duplicates_dropped,{}", self.stats.duplicates_dropped)?;
        writeln!(out, "degree_one,{}", self.degree_one)?;
        writeln!(out, "manual,{}", self.manual)?;
        writeln!(out, "paired,{}", self.paired)?;
        writeln!(out, "excess_total,{}", self.excess_total)?;
        writeln!(out, "eta_scale,{}", self.eta_scale)?;
        writeln!(out, "interconnect_draws,{}", self.interconnect_draws)
    }
}

/// Default count of hand-wired degree-1 nodes paired among themselves:
/// twice the nearest integer to `manual^2 / (2 * degree_total)`, capped at
/// the largest even number not above `manual`.
pub fn default_pairing(manual: usize, degree_total: usize) -> usize {
    let q = 2 * nint((manual * manual) as f64 / (2.0 * degree_total as f64)) as usize;
    q.min(manual - manual % 2)
}

/// Interconnect scale factor `1 - 2 (p - q) / ((p - q) + total) + beta`,
/// floored at zero.
pub fn interconnect_scale(attached: usize, excess_total: f64, beta: f64) -> f64 {
    let a = attached as f64;
    let denom = a + excess_total;
    let frac = if denom > 0.0 { a / denom } else { 0.0 };
    (1.0 - 2.0 * frac + beta).max(0.0)
}

/// Everything the BTER sampler decides before drawing edges.
#[derive(Clone, Debug)]
pub struct BterPlan {
    pub partition: CommunityPartition,
    /// Interconnect weights after the degree-1 adjustment.
    pub weights: Vec<f64>,
    pub degree_one: usize,
    pub manual: usize,
    pub paired: usize,
}

pub fn plan_bter(degrees: &DegreeSequence, cfg: &GenerationConfig) -> Result<BterPlan, GeneratorError> {
    cfg.validate()?;
    let partition = CommunityPartition::new(degrees, &cfg.connectivity);
    let r = degrees.degree_one_count();
    let p = (nint(cfg.manual_fraction * r as f64).max(0) as usize).min(r);
    let q = match cfg.q_override {
        Some(q) if q > p => {
            return Err(GeneratorError::InvalidConfig(format!(
                "q = {q} exceeds the {p} hand-wired degree-1 nodes"
            )))
        }
        Some(q) => q,
        None => default_pairing(p, degrees.total()),
    };
    let mut weights = partition.excess.clone();
    weights[..p].fill(0.0);
    weights[p..r].fill(cfg.d1_weight);
    Ok(BterPlan {
        partition,
        weights,
        degree_one: r,
        manual: p,
        paired: q,
    })
}

/// Samples a BTER graph for the target `degrees`.
///
/// Node `i` of the result corresponds to position `i` of the sorted
/// sequence. Edges come from four sources, merged at the end with repeats
/// and self-loops discarded: ER graphs inside every block, random pairs
/// among some hand-wired degree-1 nodes, one weighted attachment for each
/// other hand-wired degree-1 node, and Chung–Lu draws on the scaled
/// excess degrees.
pub fn generate_bter(degrees: &DegreeSequence, cfg: &GenerationConfig) -> Result<(Graph, PhaseTrace), GeneratorError> {
    let plan = plan_bter(degrees, cfg)?;
    let seed = cfg.seed;
    let n = degrees.len();
    let (p, q) = (plan.manual, plan.paired);

    let blocks: Vec<Edge> = plan
        .partition
        .blocks
        .par_iter()
        .zip(&plan.partition.rho)
        .enumerate()
        .map(|(k, (b, &rho))| {
            let mut out = Vec::new();
            er_edges(
                b.start,
                b.len,
                rho,
                &mut stream(seed, Phase::Blocks, k as u64),
                &mut out,
            );
            out
        })
        .collect::<Vec<_>>()
        .concat();

    let mut manual: Vec<usize> = (0..p).collect();
    manual.shuffle(&mut stream(seed, Phase::Pairing, 0));
    let pairing: Vec<Edge> = manual[..q].chunks_exact(2).map(|c| (c[0], c[1])).collect();

    let weights = &plan.weights;
    let excess_total: f64 = weights.iter().sum();
    let picker = WeightedIndex::new(weights).ok();
    let attach: Vec<Edge> = match &picker {
        Some(picker) => {
            let mut rng = stream(seed, Phase::Attach, 0);
            manual[q..].iter().map(|&i| (i, picker.sample(&mut rng))).collect()
        }
        None => Vec::new(),
    };

    let eta_scale = interconnect_scale(p - q, excess_total, cfg.beta);
    let draws = nint(eta_scale * excess_total / 2.0).max(0) as usize;
    // Scaling every weight by the same factor leaves the endpoint
    // distribution unchanged; only the draw count depends on it.
    let interconnect: Vec<Edge> = match (&picker, draws) {
        (Some(picker), d) if d > 0 => (0..d.div_ceil(DRAW_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut rng = stream(seed, Phase::Interconnect, c as u64);
                let len = DRAW_CHUNK.min(d - c * DRAW_CHUNK);
                (0..len)
                    .map(|_| (picker.sample(&mut rng), picker.sample(&mut rng)))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .concat(),
        _ => Vec::new(),
    };

    let phases = [&blocks, &pairing, &attach, &interconnect];
    let kept = first_occurrences(&phases);
    let (graph, stats) = build_graph_with_nodes(n, phases.iter().flat_map(|e| e.iter().copied()));
    let counts = |i: usize| PhaseCounts {
        raw: phases[i].len(),
        kept: kept[i],
    };
    let trace = PhaseTrace {
        blocks: counts(0),
        pairing: counts(1),
        attach: counts(2),
        interconnect: counts(3),
        stats,
        degree_one: plan.degree_one,
        manual: p,
        paired: q,
        excess_total,
        eta_scale,
        interconnect_draws: interconnect.len(),
    };
    Ok((graph, trace))
}

/// For each phase, how many distinct non-loop pairs it contributed that no
/// earlier phase already produced.
fn first_occurrences(phases: &[&Vec<Edge>]) -> Vec<usize> {
    let mut tagged: Vec<(usize, usize, usize)> = phases
        .iter()
        .enumerate()
        .flat_map(|(k, edges)| {
            edges
                .iter()
                .filter(|(u, v)| u != v)
                .map(move |&(u, v)| (u.min(v), u.max(v), k))
        })
        .collect();
    tagged.sort_unstable();
    let mut kept = vec![0; phases.len()];
    let mut last = None;
    for (u, v, k) in tagged {
        if last != Some((u, v)) {
            kept[k] += 1;
            last = Some((u, v));
        }
    }
    kept
}
