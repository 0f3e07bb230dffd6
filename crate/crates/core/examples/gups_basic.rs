//! One GUPS run in each update mode, with the error count from verification.
//!
//! ```text
//! cargo run --release --example gups_basic -- 22 4
//! ```
//! Arguments: table exponent `n` (default 20) and worker count (default 2).

use randaccess::gups::{run_gups, GupsConfig, UpdateMode};

fn main() -> randaccess::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(20, |a| a.parse().expect("n"));
    let workers = args.next().map_or(2, |a| a.parse().expect("workers"));

    for mode in [UpdateMode::Relaxed, UpdateMode::Atomic] {
        let cfg = GupsConfig::new(n)
            .workers(workers)
            .batch(32)
            .queues(4)
            .mode(mode);
        let r = run_gups(&cfg)?;
        println!(
            "{mode:>7}: {} updates in {:.3}s = {:.4} GUPS, {} errors ({:.4}%), within budget: {}",
            r.updates,
            r.elapsed,
            r.gups,
            r.error_count,
            r.error_fraction * 100.0,
            r.within_budget()
        );
    }
    Ok(())
}
