//! Measurements used to compare graphs: degree histogram, triangle and
//! wedge counts, clustering profile and the leading adjacency spectrum.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::degree::DegreeDistribution;
use crate::eigen::sym_eigen;
use crate::graph::Graph;
use crate::rng::{stream, Phase};

/// `C(d, 2)`, the number of wedges centered at a node of degree `d`.
pub fn wedges_at(d: usize) -> u64 {
    let d = d as u64;
    d * d.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleWedgeCounts {
    pub triangles: u64,
    pub wedges: u64,
    /// `(t_i, w_i)`: triangles through node `i` and wedges centered at it.
    pub per_node: Vec<(u64, u64)>,
}

/// Exact triangle and wedge counts.
///
/// Each triangle `u < v < w` is found once, from edge `(u, v)`, by merging
/// the parts of both neighbor lists above `v`, and credited to all three
/// corners. Work is split over node ranges with one accumulator per range.
pub fn count_triangles_wedges(g: &Graph) -> TriangleWedgeCounts {
    let n = g.node_count();
    let chunk = n.div_ceil(64).max(256);
    let ranges: Vec<(usize, usize)> = (0..n).step_by(chunk).map(|s| (s, (s + chunk).min(n))).collect();
    let per_triangle = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = vec![0u64; n];
            for u in lo..hi {
                let nu = g.neighbors(u);
                for &v in nu.iter().filter(|&&v| v > u) {
                    let a = &nu[nu.partition_point(|&x| x <= v)..];
                    let nv = g.neighbors(v);
                    let b = &nv[nv.partition_point(|&x| x <= v)..];
                    let (mut i, mut j) = (0, 0);
                    while i < a.len() && j < b.len() {
                        match a[i].cmp(&b[j]) {
                            std::cmp::Ordering::Less => i += 1,
                            std::cmp::Ordering::Greater => j += 1,
                            std::cmp::Ordering::Equal => {
                                acc[u] += 1;
                                acc[v] += 1;
                                acc[a[i]] += 1;
                                i += 1;
                                j += 1;
                            }
                        }
                    }
                }
            }
            acc
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let per_node: Vec<(u64, u64)> = per_triangle
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, wedges_at(g.degree(i))))
        .collect();
    let corners: u64 = per_node.iter().map(|p| p.0).sum();
    TriangleWedgeCounts {
        triangles: corners / 3,
        wedges: per_node.iter().map(|p| p.1).sum(),
        per_node,
    }
}

/// Mean local clustering over the nodes of one degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeClustering {
    pub mean_cc: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringProfile {
    /// `3 * triangles / wedges`; zero for a graph without wedges.
    pub global_c: f64,
    /// Local coefficient, `None` for nodes of degree below two.
    pub per_node: Vec<Option<f64>>,
    /// Mean local coefficient by degree, over nodes of degree two or more.
    pub by_degree: BTreeMap<usize, DegreeClustering>,
}

pub fn clustering_profile(g: &Graph) -> ClusteringProfile {
    clustering_from_counts(g, &count_triangles_wedges(g))
}

pub fn clustering_from_counts(g: &Graph, counts: &TriangleWedgeCounts) -> ClusteringProfile {
    let global_c = if counts.wedges == 0 {
        0.0
    } else {
        3.0 * counts.triangles as f64 / counts.wedges as f64
    };
    let per_node: Vec<Option<f64>> = counts
        .per_node
        .iter()
        .map(|&(t, w)| (w > 0).then(|| t as f64 / w as f64))
        .collect();
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (i, c) in per_node.iter().enumerate() {
        if let Some(c) = c {
            let e = sums.entry(g.degree(i)).or_default();
            e.0 += c;
            e.1 += 1;
        }
    }
    let by_degree = sums
        .into_iter()
        .map(|(d, (s, k))| {
            (
                d,
                DegreeClustering {
                    mean_cc: s / k as f64,
                    nodes: k,
                },
            )
        })
        .collect();
    ClusteringProfile {
        global_c,
        per_node,
        by_degree,
    }
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("requested {k} eigenvalues of a {n}-node graph")]
    TooMany { k: usize, n: usize },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("top-{} eigenvalues not converged to {} within {} basis vectors", .partial.k, .partial.tolerance, .partial.iterations)]
    NoConvergence { partial: SpectrumReport },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Largest eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `||A x - lambda x||` for the unit Ritz vector `x` of each eigenvalue.
    pub residuals: Vec<f64>,
    pub k: usize,
    pub tolerance: f64,
    /// Krylov basis size at termination.
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub k: usize,
    pub tolerance: f64,
    /// Seed of the starting and restart vectors.
    pub seed: u64,
    /// Basis size cap; `None` means `max(3k + 50, 200)`.
    pub max_basis: Option<usize>,
}

impl SpectrumOptions {
    pub fn new(k: usize, tolerance: f64) -> Self {
        SpectrumOptions {
            k,
            tolerance,
            seed: 0,
            max_basis: None,
        }
    }
}

pub const DEFAULT_TOP_K: usize = 25;

/// Largest `k` adjacency eigenvalues with residuals at most `tol`.
pub fn top_eigenvalues(g: &Graph, k: usize, tol: f64) -> Result<SpectrumReport, SpectrumError> {
    top_eigenvalues_with(g, &SpectrumOptions::new(k, tol))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components of `x` along the orthonormal `basis`, twice.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(x, b);
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
        }
    }
}

/// Lanczos with full reorthogonalization and Rayleigh–Ritz on the whole
/// basis.
///
/// Only adjacency products touch the graph. When the Krylov space becomes
/// invariant the iteration restarts from a random vector orthogonal to the
/// basis, so eigenvalues of any multiplicity are reached. After the top-k
/// residuals first drop below tolerance a restart is forced and the basis
/// grown to twice its size; the run ends once that leaves the top-k values
/// unchanged, or when the basis spans the whole space.
pub fn top_eigenvalues_with(g: &Graph, opts: &SpectrumOptions) -> Result<SpectrumReport, SpectrumError> {
    let n = g.node_count();
    let k = opts.k;
    if k > n {
        return Err(SpectrumError::TooMany { k, n });
    }
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(SpectrumError::Tolerance(opts.tolerance));
    }
    if k == 0 {
        return Ok(SpectrumReport {
            eigenvalues: vec![],
            residuals: vec![],
            k,
            tolerance: opts.tolerance,
            iterations: 0,
        });
    }
    let max_basis = opts.max_basis.unwrap_or((3 * k + 50).max(200)).min(n);
    let mut rng = stream(opts.seed, Phase::Spectrum, 0);
    let mut random_vector = |basis: &[Vec<f64>]| {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let before = norm(&x);
        orthogonalize(&mut x, basis);
        (x, before)
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    // Projected matrix by columns: h[j][i] = v_i . A v_j for i <= j.
    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut image = vec![0.0; n];
    let (mut next, mut next_scale) = random_vector(&basis);
    let mut confirmed: Option<(usize, Vec<f64>)> = None;
    let mut force_restart = false;

    loop {
        let mut exhausted = basis.len() == n;
        let mut restarted = false;
        if !exhausted {
            let mut nrm = norm(&next);
            if force_restart || nrm <= 1e-10 * next_scale {
                (next, next_scale) = random_vector(&basis);
                nrm = norm(&next);
                force_restart = false;
                restarted = true;
            }
            if nrm <= 1e-10 * next_scale {
                // Not even a random vector escapes the span: it is all of R^n
                // up to rounding.
                exhausted = true;
            } else {
                let v: Vec<f64> = next.iter().map(|x| x / nrm).collect();
                g.adjacency_mul(&v, &mut image);
                let column: Vec<f64> = basis.iter().chain([&v]).map(|b| dot(b, &image)).collect();
                h.push(column);
                basis.push(v);
                next.clone_from(&image);
                next_scale = norm(&next);
                orthogonalize(&mut next, &basis);
                exhausted = basis.len() == n;
            }
        }
        let m = basis.len();
        let due = m >= k && (exhausted || restarted || m >= max_basis || (m - k).is_multiple_of(5));
        if !due {
            continue;
        }
        let report = ritz(g, &basis, &h, k, opts.tolerance);
        let converged = report.residuals.iter().all(|&r| r <= opts.tolerance);
        if converged && (exhausted || m >= max_basis) {
            return Ok(report);
        }
        if converged {
            match &confirmed {
                None => {
                    confirmed = Some((m, report.eigenvalues.clone()));
                    force_restart = true;
                }
                // The restarted chain gets as many vectors as the first
                // convergence took before it may confirm.
                Some((first, prev)) if m >= 2 * first => {
                    let stable = prev
                        .iter()
                        .zip(&report.eigenvalues)
                        .all(|(a, b)| (a - b).abs() <= opts.tolerance);
                    if stable {
                        return Ok(report);
                    }
                    confirmed = Some((m, report.eigenvalues.clone()));
                    force_restart = true;
                }
                Some(_) => {}
            }
        }
        if m >= max_basis || exhausted {
            return Err(SpectrumError::NoConvergence { partial: report });
        }
    }
}

fn ritz(g: &Graph, basis: &[Vec<f64>], h: &[Vec<f64>], k: usize, tolerance: f64) -> SpectrumReport {
    let m = basis.len();
    let n = g.node_count();
    let mut dense = vec![0.0; m * m];
    for (j, col) in h.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            dense[i * m + j] = x;
            dense[j * m + i] = x;
        }
    }
    let eig = sym_eigen(&dense, m).expect("QL iteration converges on finite input");
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut ax = vec![0.0; n];
    for col in (m - k..m).rev() {
        let theta = eig.values[col];
        let mut x = vec![0.0; n];
        for (i, b) in basis.iter().enumerate() {
            let c = eig.vectors[i * m + col];
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += c * bi);
        }
        let scale = norm(&x);
        g.adjacency_mul(&x, &mut ax);
        let r = ax
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / scale;
        eigenvalues.push(theta);
        residuals.push(r);
    }
    SpectrumReport {
        eigenvalues,
        residuals,
        k,
        tolerance,
        iterations: m,
    }
}

/// The metric set compared between two graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub nodes: usize,
    pub edges: usize,
    pub triangles: u64,
    pub wedges: u64,
    pub degree: DegreeDistribution,
    pub global_c: f64,
    pub by_degree: BTreeMap<usize, DegreeClustering>,
    pub eigenvalues: Option<Vec<f64>>,
}

impl MetricsReport {
    /// Computes the report; the spectrum is included when `spectrum` is set.
    pub fn compute(g: &Graph, spectrum: Option<&SpectrumOptions>) -> Result<Self, SpectrumError> {
        let counts = count_triangles_wedges(g);
        let profile = clustering_from_counts(g, &counts);
        let eigenvalues = spectrum
            .map(|opts| top_eigenvalues_with(g, opts).map(|r| r.eigenvalues))
            .transpose()?;
        Ok(MetricsReport {
            nodes: g.node_count(),
            edges: g.edge_count(),
            triangles: counts.triangles,
            wedges: counts.wedges,
            degree: DegreeDistribution::of_graph(g),
            global_c: profile.global_c,
            by_degree: profile.by_degree,
            eigenvalues,
        })
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("spectra have different lengths ({0} vs {1})")]
    MismatchedK(usize, usize),
    #[error("only one report carries a spectrum")]
    MetricSetMismatch,
}

/// Distances between two metric reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    /// Total variation between the normalized degree histograms.
    pub degree_tv: f64,
    /// Largest by-degree clustering gap over degrees with at least the
    /// count floor in both reports; zero when no degree qualifies.
    pub cc_max_gap: f64,
    pub global_cc_gap: f64,
    /// `|a_i - b_i| / |b_i|` per rank, taking `b` as the reference.
    pub eigen_rel_gaps: Vec<f64>,
}

impl Divergence {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "metric,value")?;
        writeln!(out, "degree_tv,{}", self.degree_tv)?;
        writeln!(out, "cc_max_gap,{}", self.cc_max_gap)?;
        writeln!(out, "global_cc_gap,{}", self.global_cc_gap)?;
        for (i, g) in self.eigen_rel_gaps.iter().enumerate() {
            writeln!(out, "eigen_rel_gap_{},{g}", i + 1)?;
        }
        Ok(())
    }
}

pub fn compare_reports(a: &MetricsReport, b: &MetricsReport, count_floor: usize) -> Result<Divergence, CompareError> {
    let eigen_rel_gaps = match (&a.eigenvalues, &b.eigenvalues) {
        (Some(x), Some(y)) if x.len() != y.len() => return Err(CompareError::MismatchedK(x.len(), y.len())),
        (Some(x), Some(y)) => x
            .iter()
            .zip(y)
            .map(|(p, q)| {
                let diff = (p - q).abs();
                if *q == 0.0 {
                    diff
                } else {
                    diff / q.abs()
                }
            })
            .collect(),
        (None, None) => vec![],
        _ => return Err(CompareError::MetricSetMismatch),
    };
    let cc_max_gap = a
        .by_degree
        .iter()
        .filter_map(|(d, ca)| {
            let cb = b.by_degree.get(d)?;
            (ca.nodes >= count_floor && cb.nodes >= count_floor).then(|| (ca.mean_cc - cb.mean_cc).abs())
        })
        .fold(0.0, f64::max);
    Ok(Divergence {
        degree_tv: a.degree.total_variation(&b.degree),
        cc_max_gap,
        global_cc_gap: (a.global_c - b.global_c).abs(),
        eigen_rel_gaps,
    })
}

pub fn write_degree_csv<W: Write>(dist: &DegreeDistribution, mut out: W) -> io::Result<()> {
    writeln!(out, "degree,count")?;
    for (d, c) in dist.counts() {
        writeln!(out, "{d},{c}")?;
    }
    Ok(())
}

pub fn write_cc_csv<W: Write>(by_degree: &BTreeMap<usize, DegreeClustering>, mut out: W) -> io::Result<()> {
    writeln!(out, "degree,mean_cc,node_count")?;
    for (d, c) in by_degree {
        writeln!(out, "{d},{},{}", c.mean_cc, c.nodes)?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(report: &SpectrumReport, mut out: W) -> io::Result<()> {
    writeln!(out, "rank,eigenvalue,residual")?;
    for (i, (l, r)) in report.eigenvalues.iter().zip(&report.residuals).enumerate() {
        writeln!(out, "{},{l},{r}", i + 1)?;
    }
    Ok(())
}

pub fn write_triangles_csv<W: Write>(counts: &TriangleWedgeCounts, mut out: W) -> io::Result<()> {
    writeln!(out, "node,triangles,wedges")?;
    for (i, (t, w)) in counts.per_node.iter().enumerate() {
        writeln!(out, "{i},{t},{w}")?;
    }
    Ok(())
}

/// `metric,value` summary rows.
pub fn write_summary_csv<W: Write>(rows: &[(&str, String)], mut out: W) -> io::Result<()> {
    writeln!(out, "metric,value")?;
    for (k, v) in rows {
        writeln!(out, "{k},{v}")?;
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum ReportReadError {
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>, ReportReadError> {
    let csv_err = |source| ReportReadError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.records().collect::<Result<_, _>>().map_err(csv_err)
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T, ReportReadError> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ReportReadError::Malformed {
            path: path.to_path_buf(),
            message: format!("bad field {i} in {rec:?}"),
        })
}

/// Loads a report from the CSV files `analyze` writes: `summary.csv`,
/// `degree.csv`, `cc.csv` and, when present, `spectrum.csv`.
pub fn read_report_dir(dir: &Path) -> Result<MetricsReport, ReportReadError> {
    let summary_path = dir.join("summary.csv");
    let mut summary = BTreeMap::new();
    for rec in read_rows(&summary_path)? {
        summary.insert(
            rec.get(0).unwrap_or("").to_string(),
            rec.get(1).unwrap_or("").to_string(),
        );
    }
    let get = |key: &str| -> Result<String, ReportReadError> {
        summary.get(key).cloned().ok_or_else(|| ReportReadError::Malformed {
            path: summary_path.clone(),
            message: format!("missing {key}"),
        })
    };
    let num = |key: &str| -> Result<f64, ReportReadError> {
        get(key)?.parse().map_err(|_| ReportReadError::Malformed {
            path: summary_path.clone(),
            message: format!("bad {key}"),
        })
    };

    let degree_path = dir.join("degree.csv");
    let mut counts = Vec::new();
    for rec in read_rows(&degree_path)? {
        counts.push((field(&degree_path, &rec, 0)?, field(&degree_path, &rec, 1)?));
    }
    let cc_path = dir.join("cc.csv");
    let mut by_degree = BTreeMap::new();
    for rec in read_rows(&cc_path)? {
        by_degree.insert(
            field(&cc_path, &rec, 0)?,
            DegreeClustering {
                mean_cc: field(&cc_path, &rec, 1)?,
                nodes: field(&cc_path, &rec, 2)?,
            },
        );
    }
    let spectrum_path = dir.join("spectrum.csv");
    let eigenvalues = if spectrum_path.exists() {
        let rows = read_rows(&spectrum_path)?;
        Some(
            rows.iter()
                .map(|r| field(&spectrum_path, r, 1))
                .collect::<Result<Vec<f64>, _>>()?,
        )
    } else {
        None
    };
    Ok(MetricsReport {
        nodes: num("nodes")? as usize,
        edges: num("edges")? as usize,
        triangles: num("triangles")? as u64,
        wedges: num("wedges")? as u64,
        degree: DegreeDistribution::from_counts(counts),
        global_c: num("global_cc")?,
        by_degree,
        eigenvalues,
    })
}
