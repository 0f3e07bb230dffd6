//! Dynamic chunk claiming against a static even split on a graph with one
//! very high-degree hub. Needs several hardware threads to show a difference.
//!
//! ```text
//! cargo run --release --example load_balance -- 4
//! ```

use std::time::Instant;

use randaccess::bc::{compute_bc, K4Config, Scheduler};
use randaccess::graph::{generate_hub_skewed, GenConfig};

fn main() -> randaccess::Result<()> {
    let workers: usize = std::env::args()
        .nth(1)
        .map_or(4, |a| a.parse().expect("workers"));
    let g = generate_hub_skewed(&GenConfig::new(14).seed(3), 0.25)?;
    println!(
        "hub out-degree {} of {} edges, {workers} workers, {} hardware threads",
        g.out_degree(0),
        g.num_edges(),
        randaccess::report::hardware_threads()
    );

    let runs = [
        (Scheduler::Static, 1),
        (Scheduler::Dynamic, 4),
        (Scheduler::Dynamic, 16),
        (Scheduler::Dynamic, 64),
    ];
    for (scheduler, chunk) in runs {
        let cfg = K4Config::approx(8)
            .workers(workers)
            .chunk(chunk)
            .scheduler(scheduler);
        let started = Instant::now();
        let (_, report) = compute_bc(&g, &cfg)?;
        let label = match scheduler {
            Scheduler::Static => "static even split".to_string(),
            Scheduler::Dynamic => format!("dynamic, chunk {chunk}"),
        };
        println!(
            "{label:>18}: {:>8.2} MTEPS ({:.3}s)",
            report.teps / 1e6,
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
