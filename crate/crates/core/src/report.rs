//! Benchmark records and their CSV form.
//!
//! Every row carries the full configuration that produced it, so a run can
//! be repeated from the row alone. Columns that do not apply to a benchmark
//! are left empty. See [`COLUMNS`] for the fixed column order.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::bc::{K4Config, K4Report};
use crate::graph::GenConfig;
use crate::gups::{GupsConfig, GupsResult};
use crate::{Error, Result};

pub const COLUMNS: &[&str] = &[
    "benchmark",
    "rep",
    "workers",
    "n",
    "updates",
    "batch",
    "queues",
    "update_mode",
    "scale",
    "edge_factor",
    "seed",
    "rmat_a",
    "rmat_b",
    "rmat_c",
    "rmat_d",
    "k4approx",
    "chunk",
    "batch_depth",
    "edge_filter",
    "source_seed",
    "scheduler",
    "elapsed_s",
    "gups",
    "error_count",
    "error_fraction",
    "sources",
    "edges_traversed",
    "time_bfs_s",
    "time_backtrace_s",
    "time_atomic_s",
    "teps",
    "bfs_backtrace_ratio",
    "atomic_share",
    "invariant_violations",
    "verified",
    "hardware_threads",
    "timestamp",
];

/// Decimal places per float column.
pub const SECONDS_PRECISION: usize = 9;
pub const GUPS_PRECISION: usize = 9;
pub const FRACTION_PRECISION: usize = 9;
pub const TEPS_PRECISION: usize = 3;
pub const RATIO_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Gups,
    Ssca2,
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Benchmark::Gups => "gups",
            Benchmark::Ssca2 => "ssca2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunRecord {
    Gups {
        config: GupsConfig,
        result: GupsResult,
    },
    Ssca2 {
        graph: GenConfig,
        kernel: K4Config,
        report: K4Report,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub rep: usize,
    pub run: RunRecord,
    /// `None` when verification was not requested.
    pub verified: Option<bool>,
    pub hardware_threads: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl BenchRecord {
    /// Stamps `run` with the current time and the host's thread count.
    pub fn new(rep: usize, run: RunRecord, verified: Option<bool>) -> Self {
        BenchRecord {
            rep,
            run,
            verified,
            hardware_threads: hardware_threads(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn benchmark(&self) -> Benchmark {
        match self.run {
            RunRecord::Gups { .. } => Benchmark::Gups,
            RunRecord::Ssca2 { .. } => Benchmark::Ssca2,
        }
    }

    fn fields(&self) -> Vec<String> {
        let mut row = vec![String::new(); COLUMNS.len()];
        let mut set = |name: &str, value: String| {
            let i = COLUMNS
                .iter()
                .position(|c| *c == name)
                .expect("known column");
            row[i] = value;
        };
        set("benchmark", self.benchmark().to_string());
        set("rep", self.rep.to_string());
        match &self.run {
            RunRecord::Gups { config, result } => {
                set("workers", config.num_workers.to_string());
                set("n", config.n.to_string());
                set("updates", result.updates.to_string());
                set("batch", config.batch_len.to_string());
                set("queues", config.queues_per_worker.to_string());
                set("update_mode", config.update_mode.to_string());
                set("elapsed_s", fixed(result.elapsed, SECONDS_PRECISION));
                set("gups", fixed(result.gups, GUPS_PRECISION));
                set("error_count", result.error_count.to_string());
                set(
                    "error_fraction",
                    fixed(result.error_fraction, FRACTION_PRECISION),
                );
            }
            RunRecord::Ssca2 {
                graph,
                kernel,
                report,
            } => {
                set("workers", kernel.num_workers.to_string());
                set("scale", graph.scale.to_string());
                set("edge_factor", graph.edge_factor.to_string());
                set("seed", graph.seed.to_string());
                for (col, p) in ["rmat_a", "rmat_b", "rmat_c", "rmat_d"]
                    .iter()
                    .zip(graph.rmat_probs)
                {
                    set(col, p.to_string());
                }
                set(
                    "k4approx",
                    kernel
                        .k4approx
                        .map(|k| k.to_string())
                        .unwrap_or_else(|| graph.scale.to_string()),
                );
                set("chunk", kernel.chunk_size.to_string());
                set("batch_depth", kernel.batch_depth.to_string());
                set("edge_filter", kernel.edge_filter.to_string());
                set("source_seed", kernel.source_seed.to_string());
                set("scheduler", kernel.scheduler.to_string());
                set(
                    "elapsed_s",
                    fixed(report.time_bfs + report.time_backtrace, SECONDS_PRECISION),
                );
                set("sources", report.sources.to_string());
                set("edges_traversed", report.edges_traversed.to_string());
                set("time_bfs_s", fixed(report.time_bfs, SECONDS_PRECISION));
                set(
                    "time_backtrace_s",
                    fixed(report.time_backtrace, SECONDS_PRECISION),
                );
                set(
                    "time_atomic_s",
                    fixed(report.time_atomic, SECONDS_PRECISION),
                );
                set("teps", fixed(report.teps, TEPS_PRECISION));
                set(
                    "bfs_backtrace_ratio",
                    fixed(report.bfs_backtrace_ratio, RATIO_PRECISION),
                );
                set("atomic_share", fixed(report.atomic_share, RATIO_PRECISION));
                set(
                    "invariant_violations",
                    report.invariant_violations.to_string(),
                );
            }
        }
        if let Some(ok) = self.verified {
            set("verified", ok.to_string());
        }
        set("hardware_threads", self.hardware_threads.to_string());
        set("timestamp", self.timestamp.to_string());
        row
    }
}

pub fn hardware_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Fixed-point formatting used by every float column.
pub fn fixed(value: f64, precision: usize) -> String {
    format!("{value:.precision$}")
}

/// One header line plus one line per record.
pub fn emit_report(records: &[BenchRecord]) -> Result<String> {
    let mut out = Vec::new();
    write_records(records, &mut out)?;
    Ok(String::from_utf8(out).expect("CSV output is ASCII"))
}

/// Writes [`emit_report`] output to `path`.
pub fn write_report(records: &[BenchRecord], path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_records(records, BufWriter::new(file))
}

fn write_records<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::config("a report needs at least one record"));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gups::UpdateMode;

    fn gups_record(rep: usize) -> BenchRecord {
        BenchRecord::new(
            rep,
            RunRecord::Gups {
                config: GupsConfig::new(12).workers(2).mode(UpdateMode::Atomic),
                result: GupsResult {
                    elapsed: 0.012_345_678_91,
                    updates: 4 << 12,
                    gups: 0.001_327_123_456_7,
                    error_count: 3,
                    error_fraction: 3.0 / 4096.0,
                },
            },
            Some(true),
        )
    }

    fn ssca2_record() -> BenchRecord {
        let mut report = K4Report {
            sources: 256,
            edges_traversed: 123_456,
            time_bfs: 0.5,
            time_backtrace: 0.125,
            time_atomic: 0.1,
            ..K4Report::default()
        };
        report.finish();
        BenchRecord::new(
            0,
            RunRecord::Ssca2 {
                graph: GenConfig::new(10),
                kernel: K4Config::approx(8).workers(4),
                report,
            },
            None,
        )
    }

    #[test]
    fn one_record_two_lines() {
        let text = emit_report(&[gups_record(0)]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    }

    #[test]
    fn sixteen_records_seventeen_lines() {
        let recs: Vec<_> = (0..16).map(gups_record).collect();
        assert_eq!(emit_report(&recs).unwrap().lines().count(), 17);
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(emit_report(&[]).is_err());
    }

    #[test]
    fn numeric_fields_round_trip_at_emitted_precision() {
        let text = emit_report(&[gups_record(1), ssca2_record()]).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, COLUMNS);
        let precision = |col: &str| match col {
            "elapsed_s" | "time_bfs_s" | "time_backtrace_s" | "time_atomic_s" => {
                Some(SECONDS_PRECISION)
            }
            "gups" => Some(GUPS_PRECISION),
            "error_fraction" => Some(FRACTION_PRECISION),
            "teps" => Some(TEPS_PRECISION),
            "bfs_backtrace_ratio" | "atomic_share" => Some(RATIO_PRECISION),
            _ => None,
        };
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        for row in &rows {
            for (col, field) in COLUMNS.iter().zip(row.iter()) {
                if field.is_empty() {
                    continue;
                }
                if let Some(p) = precision(col) {
                    let parsed: f64 = field.parse().unwrap();
                    assert_eq!(fixed(parsed, p), field, "{col}");
                }
            }
        }
        let teps_col = COLUMNS.iter().position(|c| *c == "teps").unwrap();
        assert_eq!(&rows[1][teps_col], "197529.600");
        let ratio_col = COLUMNS
            .iter()
            .position(|c| *c == "bfs_backtrace_ratio")
            .unwrap();
        assert_eq!(&rows[1][ratio_col], "4.000000");
        let gups_col = COLUMNS.iter().position(|c| *c == "gups").unwrap();
        assert_eq!(&rows[0][gups_col], "0.001327123");
        assert_eq!(rows[1][gups_col].len(), 0);
    }
}
