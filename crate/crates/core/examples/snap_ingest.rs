//! Read a SNAP-style edge list: comments, self-loops, both directions of
//! each edge, sparse node ids. Pass a path to read your own file.

use std::error::Error;
use std::io::Write;

use bter::degree::extract_degrees;
use bter::graph::read_snap_edgelist;

const SAMPLE: &str = "\
# Directed graph (each unordered pair is listed twice)
# FromNodeId\tToNodeId
10\t20
20\t10
20\t30
30\t20
30\t10
10\t30
30\t30
30\t4000
4000\t30
";

pub fn run_on(path: &std::path::Path) -> Result<(), Box<dyn Error>> {
    let snap = read_snap_edgelist(path)?;
    let g = &snap.graph;
    println!(
        "{}: {} edge lines, {} self-loops and {} duplicates dropped",
        path.display(),
        snap.stats.raw_edges,
        snap.stats.self_loops_dropped,
        snap.stats.duplicates_dropped
    );
    println!("{} nodes, {} undirected edges", g.node_count(), g.edge_count());
    for (u, v) in g.edges().take(10) {
        println!("  {} - {}", snap.original_ids[u], snap.original_ids[v]);
    }
    let degrees = extract_degrees(g)?;
    println!("degree sequence: {:?}", degrees.as_slice());
    Ok(())
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let mut file = tempfile::NamedTempFile::new()?;
    file.write_all(SAMPLE.as_bytes())?;
    run_on(file.path())
}

fn main() -> Result<(), Box<dyn Error>> {
    match std::env::args_os().nth(1) {
        Some(path) => run_on(path.as_ref()),
        None => run(),
    }
}
