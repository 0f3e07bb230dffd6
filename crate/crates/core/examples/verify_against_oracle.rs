//! Check the parallel kernel against the pair-counting oracle and a plain
//! Brandes implementation on a small graph.
//!
//! ```text
//! cargo run --example verify_against_oracle
//! ```

use randaccess::bc::{bfs_expand, compute_bc, K4Config};
use randaccess::graph::{generate, CsrGraph, GenConfig};
use randaccess::oracle::{bc_bruteforce, brandes_reference, rel_close};
use randaccess::VertexId;

fn main() -> randaccess::Result<()> {
    // two routes of equal length from 0 to 3
    let diamond = CsrGraph::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])?;
    let st = bfs_expand(&diamond, 0, &K4Config::exact())?;
    println!("diamond from 0: depth {:?}, sigma {:?}", st.depth, st.sigma);

    let g = generate(&GenConfig::new(8).seed(11))?;
    let all: Vec<VertexId> = (0..g.num_vertices() as VertexId).collect();
    let cfg = K4Config::exact().workers(4).checked();
    let (scores, report) = compute_bc(&g, &cfg)?;
    let oracle = bc_bruteforce(&g, &all, cfg.edge_filter)?;
    let brandes = brandes_reference(&g, &all, cfg.edge_filter)?;

    let mismatches = (0..g.num_vertices())
        .filter(|&v| {
            !rel_close(scores.bc[v], oracle.bc_exact[v], 1e-9)
                || !rel_close(brandes[v], oracle.bc_exact[v], 1e-9)
        })
        .count();
    let worst = scores
        .bc
        .iter()
        .zip(&oracle.bc_exact)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    println!(
        "scale 8, 4 workers: {mismatches} mismatches, worst relative error {worst:.1e}, {} invariant violations",
        report.invariant_violations
    );
    Ok(())
}
