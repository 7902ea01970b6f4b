//! Affinity-block preprocessing.
//!
//! Nodes of degree two or more are packed into consecutive blocks in
//! ascending degree order. A block opened at a node of degree `d` takes
//! `d + 1` nodes, so an Erdős–Rényi graph with density close to one gives
//! each member roughly `d` internal neighbors. Whatever each node still
//! needs after its block is its excess degree, which drives the Chung–Lu
//! interconnect.

use std::io::{self, Write};

use thiserror::Error;

use crate::degree::DegreeSequence;

#[derive(Debug, Error, PartialEq)]
pub enum CommunityError {
    #[error("block minimum degree {bar_d} outside 1..={d_max}")]
    Domain { bar_d: usize, d_max: usize },
    #[error("invalid connectivity parameters: {0}")]
    InvalidFormula(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaVariant {
    Standard,
    Cubic,
}

/// Block connectivity as a function of the block's minimum degree:
/// `rho * (1 - eta * (ln(bar_d + 1) / ln(d_max + 1))^exponent)`, clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectivityFormula {
    pub variant: FormulaVariant,
    pub rho: f64,
    pub eta: f64,
    pub exponent: i32,
}

impl ConnectivityFormula {
    pub fn standard(rho: f64, eta: f64) -> Result<Self, CommunityError> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(CommunityError::InvalidFormula(format!(
                "rho must be in (0, 1], got {rho}"
            )));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(CommunityError::InvalidFormula(format!(
                "eta must be non-negative, got {eta}"
            )));
        }
        Ok(ConnectivityFormula {
            variant: FormulaVariant::Standard,
            rho,
            eta,
            exponent: 2,
        })
    }

    /// The cubic-decay variant with its fixed constants (0.7, 0.6).
    pub fn cubic() -> Self {
        ConnectivityFormula {
            variant: FormulaVariant::Cubic,
            rho: 0.7,
            eta: 0.6,
            exponent: 3,
        }
    }
}

/// Connection probability for a block whose minimum degree is `bar_d`.
pub fn community_rho(bar_d: usize, d_max: usize, f: &ConnectivityFormula) -> Result<f64, CommunityError> {
    if bar_d < 1 || bar_d > d_max {
        return Err(CommunityError::Domain { bar_d, d_max });
    }
    let ratio = ((bar_d + 1) as f64).ln() / ((d_max + 1) as f64).ln();
    Ok((f.rho * (1.0 - f.eta * ratio.powi(f.exponent))).clamp(0.0, 1.0))
}

/// A contiguous run of nodes `start..start + len` in sorted-degree order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub len: usize,
    /// Minimum target degree in the block, i.e. the degree of its first node.
    pub bar_d: usize,
}

impl Block {
    pub fn nodes(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    /// A block is short when it ran out of nodes before reaching `bar_d + 1`.
    pub fn is_short(&self) -> bool {
        self.len < self.bar_d + 1
    }
}

/// Greedy block formation over the nodes of degree at least two.
pub fn partition_communities(seq: &DegreeSequence) -> Vec<Block> {
    let degrees = seq.as_slice();
    let mut blocks = Vec::new();
    let mut start = seq.degree_one_count();
    while start < degrees.len() {
        let bar_d = degrees[start];
        let len = (bar_d + 1).min(degrees.len() - start);
        blocks.push(Block { start, len, bar_d });
        start += len;
    }
    blocks
}

/// Excess degree per node: 1 for degree-1 nodes, otherwise the target
/// degree minus the expected within-block degree, floored at zero.
pub fn excess_degrees(seq: &DegreeSequence, blocks: &[Block], rho: &[f64]) -> Vec<f64> {
    let degrees = seq.as_slice();
    let mut excess: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    for (block, &r) in blocks.iter().zip(rho) {
        let internal = r * (block.len - 1) as f64;
        for i in block.nodes() {
            excess[i] = (degrees[i] as f64 - internal).max(0.0);
        }
    }
    excess
}

/// Preprocessing result: blocks, their connectivity and every node's excess degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityPartition {
    pub blocks: Vec<Block>,
    /// Block of each node; `None` for degree-1 nodes.
    pub assignment: Vec<Option<usize>>,
    pub rho: Vec<f64>,
    pub excess: Vec<f64>,
}

impl CommunityPartition {
    pub fn new(seq: &DegreeSequence, formula: &ConnectivityFormula) -> Self {
        let blocks = partition_communities(seq);
        let d_max = seq.max_degree();
        let last = blocks.len().checked_sub(1);
        let rho: Vec<f64> = blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if Some(k) == last && b.is_short() {
                    0.0
                } else {
                    community_rho(b.bar_d, d_max, formula).expect("bar_d lies within 1..=d_max")
                }
            })
            .collect();
        let mut assignment = vec![None; seq.len()];
        for (k, b) in blocks.iter().enumerate() {
            for i in b.nodes() {
                assignment[i] = Some(k);
            }
        }
        let excess = excess_degrees(seq, &blocks, &rho);
        CommunityPartition {
            blocks,
            assignment,
            rho,
            excess,
        }
    }

    /// Writes `node,block,bar_d,rho,excess`; the block columns are empty
    /// for unassigned nodes.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node,block,bar_d,rho,excess")?;
        for (i, (a, e)) in self.assignment.iter().zip(&self.excess).enumerate() {
            match a {
                Some(k) => writeln!(out, "{i},{k},{},{},{e}", self.blocks[*k].bar_d, self.rho[*k])?,
                None => writeln!(out, "{i},,,,{e}")?,
            }
        }
        Ok(())
    }
}
