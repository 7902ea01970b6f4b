//! Target degree sequences and degree histograms.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum DegreeError {
    #[error("a degree sequence needs at least one node")]
    Empty,
    #[error("node degrees must be at least 1, found {0}")]
    ZeroDegree(usize),
    #[error("invalid power-law parameters: {0}")]
    InvalidParameters(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Per-node target degrees, sorted ascending. Node `i` of a generated
/// graph corresponds to position `i` of this sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    pub fn new(mut degrees: Vec<usize>) -> Result<Self, DegreeError> {
        if degrees.is_empty() {
            return Err(DegreeError::Empty);
        }
        if degrees.contains(&0) {
            return Err(DegreeError::ZeroDegree(0));
        }
        degrees.sort_unstable();
        Ok(DegreeSequence(degrees))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_degree(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of degree-1 nodes; they occupy the first positions.
    pub fn degree_one_count(&self) -> usize {
        self.0.partition_point(|&d| d == 1)
    }
}

/// Degree histogram: degree `d` maps to the number of nodes with degree `d`.
/// Only positive counts are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeDistribution {
    counts: BTreeMap<usize, usize>,
}

impl DegreeDistribution {
    pub fn from_counts<I: IntoIterator<Item = (usize, usize)>>(counts: I) -> Self {
        let mut dist = DegreeDistribution::default();
        for (d, c) in counts {
            if c > 0 {
                *dist.counts.entry(d).or_default() += c;
            }
        }
        dist
    }

    /// Realized degrees of `g`, isolated nodes included under degree 0.
    pub fn of_graph(g: &Graph) -> Self {
        Self::from_counts(g.degrees().map(|d| (d, 1)))
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.counts.values().sum()
    }

    /// Expands the histogram back into a sorted sequence.
    pub fn realize(&self) -> Result<DegreeSequence, DegreeError> {
        let degrees = self
            .counts
            .iter()
            .flat_map(|(&d, &c)| std::iter::repeat_n(d, c))
            .collect();
        DegreeSequence::new(degrees)
    }

    /// Total-variation distance between the two normalized histograms.
    pub fn total_variation(&self, other: &DegreeDistribution) -> f64 {
        let (na, nb) = (self.node_count() as f64, other.node_count() as f64);
        if na == 0.0 || nb == 0.0 {
            return if na == nb { 0.0 } else { 1.0 };
        }
        let keys: std::collections::BTreeSet<usize> = self.counts.keys().chain(other.counts.keys()).copied().collect();
        0.5 * keys
            .into_iter()
            .map(|d| (self.count(d) as f64 / na - other.count(d) as f64 / nb).abs())
            .sum::<f64>()
    }
}

/// Sorted realized degrees of `g`. Fails when `g` has isolated nodes or no
/// nodes, since those cannot be targets.
pub fn extract_degrees(g: &Graph) -> Result<DegreeSequence, DegreeError> {
    DegreeSequence::new(g.degrees().collect())
}

pub fn histogram(seq: &DegreeSequence) -> DegreeDistribution {
    DegreeDistribution::from_counts(seq.as_slice().iter().map(|&d| (d, 1)))
}

/// Power-law degree sequence with `X_d ∝ d^(-gamma)` on `1..=d_max`.
///
/// Counts are apportioned by largest remainder so they sum to exactly `n`;
/// remainder ties go to the smaller degree.
pub fn synthesize_powerlaw(n: usize, gamma: f64, d_max: usize) -> Result<DegreeSequence, DegreeError> {
    if n < 1 {
        return Err(DegreeError::InvalidParameters("n must be at least 1".into()));
    }
    if d_max < 1 {
        return Err(DegreeError::InvalidParameters("d_max must be at least 1".into()));
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(DegreeError::InvalidParameters(format!(
            "exponent must be positive, got {gamma}"
        )));
    }
    let weights: Vec<f64> = (1..=d_max).map(|d| (d as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| n as f64 * w / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..d_max).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    DegreeDistribution::from_counts(counts.into_iter().enumerate().map(|(i, c)| (i + 1, c))).realize()
}

/// Reads a degree file: either CSV with a `degree,count` header, or one
/// degree per line.
pub fn read_degree_file(path: impl AsRef<Path>) -> Result<DegreeSequence, DegreeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DegreeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, message: String| DegreeError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.trim().replace(' ', "") == "degree,count" {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut counts = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize| -> Result<usize, DegreeError> {
                record
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(line, format!("bad record {record:?}")))
            };
            counts.push((field(0)?, field(1)?));
        }
        if counts.iter().any(|&(d, c)| d == 0 && c > 0) {
            return Err(DegreeError::ZeroDegree(0));
        }
        DegreeDistribution::from_counts(counts).realize()
    } else {
        let mut degrees = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            degrees.push(
                t.parse()
                    .map_err(|_| parse_err(i + 1, format!("expected a degree, found {t:?}")))?,
            );
        }
        DegreeSequence::new(degrees)
    }
}
