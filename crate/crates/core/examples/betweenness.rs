//! Approximate betweenness with sampled sources, plus the phase report.
//!
//! ```text
//! cargo run --release --example betweenness -- 14 4
//! ```
//! Arguments: graph scale (default 12) and worker count (default 1).

use randaccess::bc::{compute_bc, EdgeFilter, K4Config};
use randaccess::graph::{generate, GenConfig};

fn main() -> randaccess::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: u32 = args.next().map_or(12, |a| a.parse().expect("scale"));
    let workers: usize = args.next().map_or(1, |a| a.parse().expect("workers"));

    let g = generate(&GenConfig::new(scale).seed(1))?;
    let mut cfg = K4Config::approx(scale.min(8))
        .workers(workers)
        .filter(EdgeFilter::WeightNotMultipleOf(8));
    cfg.profile_atomics = true;
    let (scores, report) = compute_bc(&g, &cfg)?;

    let mut ranked: Vec<(usize, f64)> = scores.bc.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most central vertices:");
    for (v, bc) in ranked.iter().take(5) {
        println!(
            "  {v:>6}  {bc:>12.2}  out-degree {}",
            g.out_degree(*v as u32)
        );
    }
    println!(
        "{} sources, {} edges, {:.2} MTEPS, bfs {:.3}s, back trace {:.3}s (ratio {:.2}), atomic share {:.1}%",
        report.sources,
        report.edges_traversed,
        report.teps / 1e6,
        report.time_bfs,
        report.time_backtrace,
        report.bfs_backtrace_ratio,
        report.atomic_share * 100.0
    );
    Ok(())
}
