//! Random-access memory benchmarks.
//!
//! Two workloads live here:
//!
//! * **GUPS** (HPCC RandomAccess): XOR updates into a `2^n`-entry table driven
//!   by a GF(2) shift-register stream. See [`gups`] and [`gf2_stream`].
//! * **SSCA#2 Kernel 4**: betweenness centrality over an R-MAT scale-free
//!   graph, computed with a level-synchronous parallel BFS, chunked dynamic
//!   frontier claiming and a batched neighbor pass. See [`graph`] and [`bc`].
//!
//! [`oracle`] holds slow, independent reference implementations used by the
//! test suite and by `randbench --verify`. [`harness`] implements the
//! `randbench` command line (single runs, parameter sweeps, CSV reports).
//!
//! ## Examples
//!
//! | example | shows |
//! |---|---|
//! | `lfsr_stream` | stepping, seeking and segmenting the update stream |
//! | `gups_basic` | relaxed and atomic GUPS runs with verification |
//! | `generate_graph` | R-MAT generation, degree skew, edge-list files |
//! | `betweenness` | sampled betweenness and the phase report |
//! | `verify_against_oracle` | kernel output against both reference oracles |
//! | `load_balance` | dynamic chunk claiming against a static split |
//! | `sweep_to_csv` | a parameter sweep through the harness, read back as CSV |
//!
//! ```text
//! cargo run --release --example betweenness -- 14 4
//! ```
//!
//! ```no_run
//! use randaccess::gups::{run_gups, GupsConfig};
//!
//! let result = run_gups(&GupsConfig::new(20).workers(4)).unwrap();
//! println!("{:.6} GUPS, {} errors", result.gups, result.error_count);
//! ```

pub mod bc;
mod error;
pub mod gf2_stream;
pub mod graph;
pub mod gups;
pub mod harness;
pub mod oracle;
pub mod report;
mod sync;

pub use error::{Error, Result};

/// Vertex identifier. Graphs are limited to `2^31` vertices.
pub type VertexId = u32;
