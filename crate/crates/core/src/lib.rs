//! Block two-level Erdős–Rényi (BTER) graph synthesis and analysis.
//!
//! The crate covers the whole loop of fitting a community-structured random
//! graph to a target degree sequence and checking the result:
//!
//! - [`graph`]: simple undirected graphs, SNAP edge-list ingest, edge-list output.
//! - [`degree`]: degree sequences, histograms and power-law synthesis.
//! - [`community`]: affinity-block preprocessing, block connectivity and excess degrees.
//! - [`generator`]: BTER, Chung–Lu and Erdős–Rényi samplers.
//! - [`metrics`]: triangles, wedges, clustering profiles and the leading adjacency spectrum.
//! - [`theory`]: expected-triangle counts, the community criterion and Kruskal–Katona.
//! - [`cli`]: the `bter` command-line driver.
//!
//! ```
//! use bter::community::ConnectivityFormula;
//! use bter::degree::synthesize_powerlaw;
//! use bter::generator::{generate_bter, GenerationConfig};
//! use bter::metrics::clustering_profile;
//!
//! let degrees = synthesize_powerlaw(500, 2.0, 20).unwrap();
//! let cfg = GenerationConfig::new(7, ConnectivityFormula::standard(0.95, 0.05).unwrap());
//! let (graph, _trace) = generate_bter(&degrees, &cfg).unwrap();
//! assert!(clustering_profile(&graph).global_c > 0.1);
//! ```

pub mod cli;
pub mod community;
pub mod degree;
pub mod generator;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod theory;

mod eigen;

pub use community::{CommunityPartition, ConnectivityFormula};
pub use degree::{DegreeDistribution, DegreeSequence};
pub use generator::{GenerationConfig, PhaseTrace};
pub use graph::{EdgeStreamStats, Graph};

/// Nearest integer with ties rounded to even.
pub fn nint(x: f64) -> i64 {
    x.round_ties_even() as i64
}
