//! The `randbench` command line.
//!
//! ```text
//! randbench gups   --n 20 --workers 4 --batch 16 --queues 4 [--atomic] [--verify]
//! randbench ssca2  --scale 12 --k4approx 8 --workers 4 --chunk 16 [--verify]
//! randbench sweep  --benchmark gups --workers 1,2,4,8 --batch 1,8,16,64 --reps 3
//! randbench verify --n 16 --scale 8 --workers 4
//! ```
//!
//! A human-readable summary goes to stdout (lines start with `#`), followed
//! by the CSV report unless `--out <path>` names a file for it. Exit codes:
//! 0 success, 1 verification or I/O failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bc::{compute_bc_for, select_sources, EdgeFilter, K4Config, Scheduler};
use crate::graph::{generate, read_edge_list, write_edge_list, CsrGraph, GenConfig};
use crate::gups::{run_gups, GupsConfig, UpdateMode, ERROR_BUDGET};
use crate::oracle::{bc_bruteforce, gups_replay, rel_close};
use crate::report::{emit_report, write_report, BenchRecord, RunRecord};
use crate::{Error, Result};

/// Relative per-vertex tolerance when checking betweenness against the oracle.
pub const BC_TOLERANCE: f64 = 1e-9;

/// Default number of sampled sources, as an exponent.
pub const DEFAULT_K4APPROX: u32 = 8;

#[derive(Debug, Parser)]
#[command(
    name = "randbench",
    version,
    about = "GUPS and SSCA#2 Kernel 4 random-access benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random table updates (GUPS).
    Gups(GupsArgs),
    /// Betweenness centrality over an R-MAT graph (TEPS).
    Ssca2(Ssca2Args),
    /// Run a parameter grid and report every point.
    Sweep(SweepArgs),
    /// Quick self-check of both kernels against the reference oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Check results against the reference oracles; exit 1 on failure.
    #[arg(long)]
    verify: bool,
    /// Write the CSV report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Repetitions of every configuration.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
}

#[derive(Debug, Args)]
struct GupsArgs {
    /// Table size exponent: 2^n entries.
    #[arg(long, default_value_t = 20)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Values per fetched batch (queue length).
    #[arg(long, default_value_t = 16)]
    batch: usize,
    /// In-flight batches per worker (queue number).
    #[arg(long, default_value_t = 4)]
    queues: usize,
    /// Lossless atomic updates instead of relaxed read-xor-write.
    #[arg(long)]
    atomic: bool,
    /// Stream length; defaults to 4 * 2^n.
    #[arg(long)]
    updates: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct GraphArgs {
    /// Edges per vertex.
    #[arg(long, default_value_t = 8)]
    edge_factor: usize,
    /// Graph generator seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Source sampling seed.
    #[arg(long, default_value_t = 1)]
    source_seed: u64,
    /// `all`, or `mod<k>` to drop edges whose weight is divisible by k.
    #[arg(long, default_value = "all")]
    edge_filter: EdgeFilter,
    #[arg(long, value_enum, default_value_t = SchedulerArg::Dynamic)]
    scheduler: SchedulerArg,
    /// Time the atomic-update stage (adds timer overhead).
    #[arg(long)]
    profile: bool,
}

#[derive(Debug, Args)]
struct Ssca2Args {
    /// 2^scale vertices.
    #[arg(long, default_value_t = 10)]
    scale: u32,
    /// 2^k4approx sources; defaults to min(8, scale).
    #[arg(long)]
    k4approx: Option<u32>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Frontier vertices per dynamic claim.
    #[arg(long, default_value_t = 16)]
    chunk: usize,
    /// Neighbor batch width.
    #[arg(long, default_value_t = 64)]
    batch: usize,
    /// Load the graph from an edge list instead of generating it.
    #[arg(long, value_name = "PATH")]
    load_graph: Option<PathBuf>,
    /// Save the graph as an edge list.
    #[arg(long, value_name = "PATH")]
    dump_graph: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    benchmark: BenchmarkArg,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    workers: Vec<usize>,
    /// GUPS queue lengths, or SSCA#2 neighbor batch widths.
    #[arg(long, value_delimiter = ',')]
    batch: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    queues: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    n: Vec<u32>,
    #[arg(long)]
    atomic: bool,
    #[arg(long)]
    updates: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    scale: Vec<u32>,
    #[arg(long)]
    k4approx: Option<u32>,
    #[arg(long, value_delimiter = ',', default_value = "16")]
    chunk: Vec<usize>,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 16)]
    n: u32,
    #[arg(long, default_value_t = 8)]
    scale: u32,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchmarkArg {
    Gups,
    Ssca2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchedulerArg {
    Dynamic,
    Static,
}

impl From<SchedulerArg> for Scheduler {
    fn from(s: SchedulerArg) -> Self {
        match s {
            SchedulerArg::Dynamic => Scheduler::Dynamic,
            SchedulerArg::Static => Scheduler::Static,
        }
    }
}

enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Runs the CLI with process stdout/stderr. Returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run_cli`] with explicit output streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Gups(args) => gups_command(&args, out),
        Command::Ssca2(args) => ssca2_command(&args, out),
        Command::Sweep(args) => sweep_command(&args, out),
        Command::Verify(args) => verify_command(&args, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn finish(
    records: &[BenchRecord],
    out_path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match out_path {
        Some(path) => {
            write_report(records, path)?;
            writeln!(
                out,
                "# wrote {} records to {}",
                records.len(),
                path.display()
            )?;
        }
        None => write!(out, "{}", emit_report(records)?)?,
    }
    Ok(())
}

fn gups_once(
    cfg: &GupsConfig,
    rep: usize,
    verify: bool,
    out: &mut dyn Write,
) -> Result<BenchRecord, Failure> {
    let result = run_gups(cfg)?;
    writeln!(
        out,
        "# gups n={} workers={} batch={} queues={} mode={} updates={} elapsed={:.6}s gups={:.6} errors={} ({:.6}%)",
        cfg.n,
        cfg.num_workers,
        cfg.batch_len,
        cfg.queues_per_worker,
        cfg.update_mode,
        result.updates,
        result.elapsed,
        result.gups,
        result.error_count,
        result.error_fraction * 100.0
    )?;
    let verified = verify.then(|| {
        let lossless = cfg.num_workers == 1 || cfg.update_mode == UpdateMode::Atomic;
        result.within_budget() && (!lossless || result.error_count == 0)
    });
    Ok(BenchRecord::new(
        rep,
        RunRecord::Gups {
            config: cfg.clone(),
            result,
        },
        verified,
    ))
}

fn gups_command(args: &GupsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = GupsConfig::new(args.n)
        .workers(args.workers)
        .batch(args.batch)
        .queues(args.queues)
        .mode(if args.atomic {
            UpdateMode::Atomic
        } else {
            UpdateMode::Relaxed
        });
    cfg.updates = args.updates;
    cfg.validate()?;
    let mut records = Vec::new();
    for rep in 0..args.common.reps as usize {
        records.push(gups_once(&cfg, rep, args.common.verify, out)?);
    }
    finish(&records, args.common.out.as_ref(), out)?;
    check_verified(&records)
}

fn check_verified(records: &[BenchRecord]) -> Result<(), Failure> {
    let failed = records.iter().filter(|r| r.verified == Some(false)).count();
    if failed > 0 {
        return Err(Failure::Verification(format!(
            "{failed} of {} runs failed verification (GUPS error budget {:.0}%, BC tolerance {BC_TOLERANCE:e})",
            records.len(),
            ERROR_BUDGET * 100.0
        )));
    }
    Ok(())
}

fn kernel_config(
    graph: &GraphArgs,
    scale: u32,
    k4approx: Option<u32>,
    workers: usize,
    chunk: usize,
    batch: usize,
) -> K4Config {
    K4Config {
        k4approx: Some(k4approx.unwrap_or(DEFAULT_K4APPROX.min(scale))),
        num_workers: workers,
        chunk_size: chunk,
        batch_depth: batch,
        edge_filter: graph.edge_filter,
        source_seed: graph.source_seed,
        scheduler: graph.scheduler.into(),
        check_invariants: false,
        profile_atomics: graph.profile,
    }
}

fn gen_config(graph: &GraphArgs, scale: u32) -> GenConfig {
    GenConfig::new(scale)
        .edge_factor(graph.edge_factor)
        .seed(graph.seed)
}

/// Runs the kernel once and, if asked, compares against the pair-counting
/// oracle over the same sources.
fn ssca2_once(
    g: &CsrGraph,
    gen: &GenConfig,
    kernel: &K4Config,
    rep: usize,
    verify: bool,
    out: &mut dyn Write,
) -> Result<BenchRecord, Failure> {
    let mut kernel = kernel.clone();
    kernel.check_invariants = verify;
    let sources = select_sources(g.num_vertices(), &kernel)?;
    let (scores, report) = compute_bc_for(g, &sources, &kernel)?;
    writeln!(
        out,
        "# ssca2 scale={} |V|={} |E|={} sources={} workers={} chunk={} batch={} scheduler={} edges={} bfs={:.6}s backtrace={:.6}s teps={:.0} bfs:backtrace={:.2}",
        gen.scale,
        g.num_vertices(),
        g.num_edges(),
        report.sources,
        kernel.num_workers,
        kernel.chunk_size,
        kernel.batch_depth,
        kernel.scheduler,
        report.edges_traversed,
        report.time_bfs,
        report.time_backtrace,
        report.teps,
        report.bfs_backtrace_ratio
    )?;
    let verified = if verify {
        let oracle = bc_bruteforce(g, &sources, kernel.edge_filter)?;
        let mismatches = scores
            .bc
            .iter()
            .zip(&oracle.bc_exact)
            .filter(|(a, b)| !rel_close(**a, **b, BC_TOLERANCE))
            .count();
        writeln!(
            out,
            "# verify: {mismatches} vertices outside {BC_TOLERANCE:e} of the oracle, {} invariant violations",
            report.invariant_violations
        )?;
        Some(mismatches == 0 && report.invariant_violations == 0)
    } else {
        None
    };
    Ok(BenchRecord::new(
        rep,
        RunRecord::Ssca2 {
            graph: gen.clone(),
            kernel,
            report,
        },
        verified,
    ))
}

fn ssca2_command(args: &Ssca2Args, out: &mut dyn Write) -> Result<(), Failure> {
    let mut gen = gen_config(&args.graph, args.scale);
    let g = match &args.load_graph {
        Some(path) => {
            let g = read_edge_list(BufReader::new(File::open(path)?))?;
            gen.scale = g.num_vertices().max(1).ilog2();
            g
        }
        None => generate(&gen)?,
    };
    if let Some(path) = &args.dump_graph {
        write_edge_list(&g, BufWriter::new(File::create(path)?))?;
        writeln!(out, "# graph written to {}", path.display())?;
    }
    let kernel = kernel_config(
        &args.graph,
        gen.scale,
        args.k4approx,
        args.workers,
        args.chunk,
        args.batch,
    );
    kernel.validate()?;
    let mut records = Vec::new();
    for rep in 0..args.common.reps as usize {
        records.push(ssca2_once(&g, &gen, &kernel, rep, args.common.verify, out)?);
    }
    finish(&records, args.common.out.as_ref(), out)?;
    check_verified(&records)
}

fn sweep_command(args: &SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let reps = args.common.reps as usize;
    let verify = args.common.verify;
    let mut records = Vec::new();
    match args.benchmark {
        BenchmarkArg::Gups => {
            let batches = if args.batch.is_empty() {
                vec![16]
            } else {
                args.batch.clone()
            };
            let mode = if args.atomic {
                UpdateMode::Atomic
            } else {
                UpdateMode::Relaxed
            };
            let grid = grid4(&args.n, &args.workers, &batches, &args.queues);
            for (n, workers, batch, queues) in &grid {
                let mut cfg = GupsConfig::new(*n)
                    .workers(*workers)
                    .batch(*batch)
                    .queues(*queues)
                    .mode(mode);
                cfg.updates = args.updates;
                cfg.validate()?;
            }
            for (n, workers, batch, queues) in grid {
                let mut cfg = GupsConfig::new(n)
                    .workers(workers)
                    .batch(batch)
                    .queues(queues)
                    .mode(mode);
                cfg.updates = args.updates;
                for rep in 0..reps {
                    records.push(gups_once(&cfg, rep, verify, out)?);
                }
            }
        }
        BenchmarkArg::Ssca2 => {
            let depths = if args.batch.is_empty() {
                vec![64]
            } else {
                args.batch.clone()
            };
            let grid = grid4(&args.scale, &args.workers, &args.chunk, &depths);
            for (scale, workers, chunk, depth) in &grid {
                kernel_config(&args.graph, *scale, args.k4approx, *workers, *chunk, *depth)
                    .validate()?;
                gen_config(&args.graph, *scale).validate()?;
            }
            let mut current: Option<(u32, CsrGraph)> = None;
            for (scale, workers, chunk, depth) in grid {
                let gen = gen_config(&args.graph, scale);
                if current.as_ref().map(|(s, _)| *s) != Some(scale) {
                    current = Some((scale, generate(&gen)?));
                }
                let g = &current.as_ref().expect("graph generated above").1;
                let kernel =
                    kernel_config(&args.graph, scale, args.k4approx, workers, chunk, depth);
                for rep in 0..reps {
                    records.push(ssca2_once(g, &gen, &kernel, rep, verify, out)?);
                }
            }
        }
    }
    finish(&records, args.common.out.as_ref(), out)?;
    check_verified(&records)
}

/// Row-major product, first list outermost.
fn grid4<A: Copy, B: Copy, C: Copy, D: Copy>(
    a: &[A],
    b: &[B],
    c: &[C],
    d: &[D],
) -> Vec<(A, B, C, D)> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len() * d.len());
    for &x in a {
        for &y in b {
            for &z in c {
                for &w in d {
                    out.push((x, y, z, w));
                }
            }
        }
    }
    out
}

fn verify_command(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut records = Vec::new();
    let mut failures = Vec::new();

    for mode in [UpdateMode::Atomic, UpdateMode::Relaxed] {
        let cfg = GupsConfig::new(args.n).workers(args.workers).mode(mode);
        let rec = gups_once(&cfg, 0, true, out)?;
        if mode == UpdateMode::Atomic {
            let table = crate::gups::UpdateTable::new(args.n)?;
            crate::gups::apply_updates(&cfg, &table)?;
            let identical = table.to_vec() == gups_replay(args.n, cfg.stream_len()).to_vec();
            writeln!(
                out,
                "# gups atomic table identical to sequential replay: {identical}"
            )?;
            if !identical {
                failures.push("atomic GUPS table differs from sequential replay".to_string());
            }
        }
        if rec.verified == Some(false) {
            failures.push(format!("GUPS {mode} run over budget"));
        }
        records.push(rec);
    }

    let gen = GenConfig::new(args.scale).seed(args.seed);
    let g = generate(&gen)?;
    let kernel = K4Config::approx(args.scale).workers(args.workers);
    let rec = ssca2_once(&g, &gen, &kernel, 0, true, out)?;
    if rec.verified == Some(false) {
        failures.push("exact betweenness differs from the oracle".to_string());
    }
    records.push(rec);

    finish(&records, args.out.as_ref(), out)?;
    if failures.is_empty() {
        writeln!(out, "# all checks passed")?;
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}
