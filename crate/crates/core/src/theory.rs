//! Computable consequences of the community analysis: expected triangle
//! counts under Chung–Lu, the community criterion, the Kruskal–Katona
//! bound and the predicted community-size profile.

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::wedges_at;

/// Largest node count for which the expected triangle count is summed
/// exactly over all triples.
pub const EXACT_TRIPLE_LIMIT: usize = 1000;

/// Default ER-core constants `c`: nodes with internal degree at least `c * sqrt(s)`.
pub const CORE_CONSTANTS: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("no internal degrees given")]
    Empty,
    #[error("internal degrees must be positive")]
    NonPositive,
    #[error("internal edge count {0} is below one")]
    TooFewEdges(f64),
    #[error("kappa must lie in (0, 1), got {0}")]
    Kappa(f64),
    #[error("invalid prediction parameters: {0}")]
    Prediction(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleEstimate {
    pub value: f64,
    /// `false` when `value` is the closed-form upper bound rather than the
    /// exact sum.
    pub exact: bool,
}

fn half_total(degrees: &[f64]) -> f64 {
    degrees.iter().sum::<f64>() / 2.0
}

/// Closed-form upper bound `(sum d^2)^3 / (8 s^3)` on the expected count.
pub fn cl_triangle_bound(degrees: &[f64]) -> f64 {
    let s = half_total(degrees);
    let sq: f64 = degrees.iter().map(|d| d * d).sum();
    sq.powi(3) / (8.0 * s.powi(3))
}

/// Expected triangles of a Chung–Lu graph on `degrees`, where pair `(i, j)`
/// appears with probability `min(1, d_i d_j / 2s)` and `s` is half the
/// degree total. Exact up to [`EXACT_TRIPLE_LIMIT`] nodes, the bound above it.
pub fn cl_expected_triangles(degrees: &[f64]) -> Result<TriangleEstimate, TheoryError> {
    if degrees.is_empty() {
        return Err(TheoryError::Empty);
    }
    if degrees.iter().any(|&d| d.is_nan() || d <= 0.0) {
        return Err(TheoryError::NonPositive);
    }
    let s = half_total(degrees);
    if s < 1.0 {
        return Err(TheoryError::TooFewEdges(s));
    }
    let r = degrees.len();
    if r > EXACT_TRIPLE_LIMIT {
        return Ok(TriangleEstimate {
            value: cl_triangle_bound(degrees),
            exact: false,
        });
    }
    let p = |i: usize, j: usize| (degrees[i] * degrees[j] / (2.0 * s)).min(1.0);
    // Per-i partial sums, reduced in index order.
    let partial: Vec<f64> = (0..r)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in i + 1..r {
                let pij = p(i, j);
                for k in j + 1..r {
                    acc += pij * p(j, k) * p(i, k);
                }
            }
            acc
        })
        .collect();
    Ok(TriangleEstimate {
        value: partial.iter().sum(),
        exact: true,
    })
}

/// `t <= m^(3/2)`, compared exactly as `t^2 <= m^3`.
pub fn kruskal_katona_check(triangles: u64, edges: u64) -> bool {
    let t2 = (triangles as u128) * (triangles as u128);
    match (edges as u128)
        .checked_mul(edges as u128)
        .and_then(|x| x.checked_mul(edges as u128))
    {
        Some(m3) => t2 <= m3,
        None => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreCensus {
    pub c: f64,
    /// Nodes with internal degree at least `c * sqrt(s)`.
    pub count: usize,
    /// Smallest internal degree among them.
    pub min_degree: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommunityAudit {
    /// Internal edge count, half the internal degree total.
    pub s: f64,
    pub expected_triangles: TriangleEstimate,
    /// `(kappa / 3) * sum C(d_i, 2)`.
    pub wedge_threshold: f64,
    pub kappa: f64,
    pub passes: bool,
    pub er_core: Vec<CoreCensus>,
    /// Whether the wedges outnumber the degree-1 nodes. Reported only.
    pub wedges_exceed_leaves: bool,
}

/// Evaluates the community criterion: the expected internal triangle count
/// must exceed `(kappa / 3) * sum C(d_i, 2)`.
pub fn audit_community(internal_degrees: &[u64], kappa: f64) -> Result<CommunityAudit, TheoryError> {
    audit_community_with(internal_degrees, kappa, &CORE_CONSTANTS)
}

pub fn audit_community_with(
    internal_degrees: &[u64],
    kappa: f64,
    core_constants: &[f64],
) -> Result<CommunityAudit, TheoryError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(TheoryError::Kappa(kappa));
    }
    let degrees: Vec<f64> = internal_degrees.iter().map(|&d| d as f64).collect();
    let expected = cl_expected_triangles(&degrees)?;
    let s = half_total(&degrees);
    let wedges: u64 = internal_degrees.iter().map(|&d| wedges_at(d as usize)).sum();
    let wedge_threshold = kappa / 3.0 * wedges as f64;
    let leaves = internal_degrees.iter().filter(|&&d| d == 1).count() as u64;
    let er_core = core_constants
        .iter()
        .map(|&c| {
            let cut = c * s.sqrt();
            let members: Vec<f64> = degrees.iter().copied().filter(|&d| d >= cut).collect();
            CoreCensus {
                c,
                count: members.len(),
                min_degree: members.into_iter().reduce(f64::min),
            }
        })
        .collect();
    Ok(CommunityAudit {
        s,
        expected_triangles: expected,
        wedge_threshold,
        kappa,
        passes: expected.value > wedge_threshold,
        er_core,
        wedges_exceed_leaves: wedges > leaves,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommunityProfile {
    /// `(d, n / d^(gamma + 1))` for `d = 1..=max_size`.
    pub counts: Vec<(usize, f64)>,
    /// Largest `d` with `d^(gamma + 1) <= n`.
    pub max_size: usize,
}

/// Predicted community counts by size for `n` nodes with degree exponent
/// `gamma`.
pub fn predict_community_profile(n: u64, gamma: f64) -> Result<CommunityProfile, TheoryError> {
    if n < 1 {
        return Err(TheoryError::Prediction("n must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(TheoryError::Prediction(format!("gamma must be positive, got {gamma}")));
    }
    let e = gamma + 1.0;
    let fits = |d: usize| (d as f64).powf(e) <= n as f64;
    let mut d = ((n as f64).powf(1.0 / e).floor() as usize).max(1);
    while fits(d + 1) {
        d += 1;
    }
    while d > 1 && !fits(d) {
        d -= 1;
    }
    let counts = (1..=d).map(|s| (s, n as f64 / (s as f64).powf(e))).collect();
    Ok(CommunityProfile { counts, max_size: d })
}
