//! Simple undirected graphs and edge-list I/O.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: expected two integer node ids, found {content:?}")]
    Parse {
        path: PathBuf,
        line: usize,
        content: String,
    },
}

/// Accounting for an edge stream fed to [`build_graph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeStreamStats {
    pub raw_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl EdgeStreamStats {
    pub fn kept(&self) -> usize {
        self.raw_edges - self.self_loops_dropped - self.duplicates_dropped
    }
}

/// An immutable simple undirected graph on nodes `0..n`.
///
/// Neighbor lists are stored in compressed sparse row form and kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// The graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    /// Sorted neighbors of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Number of nodes with at least one neighbor.
    pub fn non_isolated_count(&self) -> usize {
        self.degrees().filter(|&d| d > 0).count()
    }

    /// `y = A x` for the adjacency matrix `A`.
    pub fn adjacency_mul(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        y.par_iter_mut().enumerate().for_each(|(u, yu)| {
            *yu = self.neighbors(u).iter().map(|&v| x[v]).sum();
        });
    }
}

/// Builds a simple graph from an edge stream. The node count is one more
/// than the largest id seen.
pub fn build_graph<I>(stream: I) -> (Graph, EdgeStreamStats)
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let pairs: Vec<(usize, usize)> = stream.into_iter().collect();
    let n = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    build_graph_with_nodes(n, pairs)
}

/// Builds a simple graph on exactly `n` nodes, dropping self-loops and
/// repeated pairs.
///
/// # Panics
///
/// If the stream names a node id `>= n`.
pub fn build_graph_with_nodes<I>(n: usize, stream: I) -> (Graph, EdgeStreamStats)
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut stats = EdgeStreamStats::default();
    let mut pairs = Vec::new();
    for (u, v) in stream {
        assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
        stats.raw_edges += 1;
        if u == v {
            stats.self_loops_dropped += 1;
        } else {
            pairs.push((u.min(v), u.max(v)));
        }
    }
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    stats.duplicates_dropped = before - pairs.len();
    (from_sorted_pairs(n, &pairs), stats)
}

fn from_sorted_pairs(n: usize, pairs: &[(usize, usize)]) -> Graph {
    let mut offsets = vec![0usize; n + 1];
    for &(u, v) in pairs {
        offsets[u + 1] += 1;
        offsets[v + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut neighbors = vec![0usize; 2 * pairs.len()];
    // Filling in lexicographic pair order leaves every list sorted.
    for &(u, v) in pairs {
        neighbors[cursor[u]] = v;
        cursor[u] += 1;
        neighbors[cursor[v]] = u;
        cursor[v] += 1;
    }
    Graph { offsets, neighbors }
}

/// A graph read from a SNAP-style edge list.
#[derive(Clone, Debug)]
pub struct SnapGraph {
    pub graph: Graph,
    /// `original_ids[i]` is the id node `i` carried in the file.
    pub original_ids: Vec<u64>,
    pub stats: EdgeStreamStats,
}

impl SnapGraph {
    /// Distinct ids seen in the file, including ids that only occur in
    /// self-loops.
    pub fn raw_node_count(&self) -> usize {
        self.original_ids.len()
    }
}

/// Reads a SNAP edge list. Directed inputs are symmetrized; ids are
/// compacted to `0..n` in ascending order of the original id.
pub fn read_snap_edgelist(path: impl AsRef<Path>) -> Result<SnapGraph, GraphError> {
    let path = path.as_ref();
    let io_err = |source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut raw = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = || GraphError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            content: line.clone(),
        };
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(parse_err());
        };
        let u: u64 = a.parse().map_err(|_| parse_err())?;
        let v: u64 = b.parse().map_err(|_| parse_err())?;
        raw.push((u, v));
    }

    let mut original_ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    original_ids.sort_unstable();
    original_ids.dedup();
    let index: HashMap<u64, usize> = original_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let (graph, stats) = build_graph_with_nodes(original_ids.len(), raw.iter().map(|(u, v)| (index[u], index[v])));
    Ok(SnapGraph {
        graph,
        original_ids,
        stats,
    })
}

/// Writes one `u v` line per edge, `u < v`, in lexicographic order.
pub fn write_edgelist_to<W: Write>(g: &Graph, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

pub fn write_edgelist(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    let io_err = |source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_edgelist_to(g, file).map_err(io_err)
}
