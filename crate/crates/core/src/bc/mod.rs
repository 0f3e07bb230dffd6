//! SSCA#2 Kernel 4: betweenness centrality.
//!
//! For every sampled source `s` the kernel runs two phases:
//!
//! 1. **BFS expansion.** Level-synchronous BFS from `s`. For each frontier
//!    vertex `v` and neighbor `w`, the first worker to see `d[w] < 0` claims
//!    it with a compare-exchange and enqueues it; whenever
//!    `d[w] == d[v] + 1`, `sigma[v]` is atomically added into `sigma[w]` and
//!    `v` is appended to `w`'s predecessor list. Frontier vertices are handed
//!    out by a [`Scheduler`]; neighbor reads go through a batched pass of
//!    width `batch_depth` (gather ids, gather depths, then update).
//! 2. **Back trace.** Walk the visit stack from the deepest level up,
//!    accumulating `delta[v] += sigma[v] / sigma[w] * (1 + delta[w])` over
//!    BFS-DAG edges `v -> w`, and add `delta[w]` into `bc[w]` for `w != s`.
//!
//! With one worker the back trace pops the stack and pushes into
//! predecessors, exactly as in the reference kernel. With several workers
//! each vertex instead pulls from its successors one level at a time, so
//! no two workers ever write the same `delta` entry and no float atomics
//! are needed. Both routes sum the same terms; only the order differs.

mod engine;
mod schedule;

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use self::schedule::{claim_chunk, static_slice, FrontierCursor, Scheduler};

use self::engine::{Engine, RunMode};
use crate::graph::CsrGraph;
use crate::{Error, Result, VertexId};

/// Which edges the BFS may follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeFilter {
    #[default]
    All,
    /// Keep edges whose weight is not a multiple of the given modulus.
    WeightNotMultipleOf(u32),
}

impl EdgeFilter {
    #[inline(always)]
    pub fn accepts(&self, weight: u32) -> bool {
        match *self {
            EdgeFilter::All => true,
            EdgeFilter::WeightNotMultipleOf(m) => !weight.is_multiple_of(m),
        }
    }
}

impl fmt::Display for EdgeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeFilter::All => f.write_str("all"),
            EdgeFilter::WeightNotMultipleOf(m) => write!(f, "mod{m}"),
        }
    }
}

impl FromStr for EdgeFilter {
    type Err = Error;

    /// `all`, or `mod<k>` (k >= 2) to drop edges whose weight is divisible by k.
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(EdgeFilter::All);
        }
        match s.strip_prefix("mod").map(str::parse::<u32>) {
            Some(Ok(m)) if m >= 2 => Ok(EdgeFilter::WeightNotMultipleOf(m)),
            _ => Err(Error::config(format!(
                "edge filter `{s}` is neither `all` nor `mod<k>` with k >= 2"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct K4Config {
    /// `|V_S| = 2^k4approx` sampled sources; `None` runs every vertex.
    pub k4approx: Option<u32>,
    pub num_workers: usize,
    /// Frontier vertices per claim under [`Scheduler::Dynamic`].
    pub chunk_size: usize,
    /// Width of the batched neighbor pass.
    pub batch_depth: usize,
    pub edge_filter: EdgeFilter,
    pub source_seed: u64,
    pub scheduler: Scheduler,
    /// Check depth and path-count invariants after every BFS.
    pub check_invariants: bool,
    /// Time the atomic-update stage of every batch.
    pub profile_atomics: bool,
}

impl Default for K4Config {
    fn default() -> Self {
        K4Config {
            k4approx: None,
            num_workers: 1,
            chunk_size: 16,
            batch_depth: 64,
            edge_filter: EdgeFilter::All,
            source_seed: 1,
            scheduler: Scheduler::Dynamic,
            check_invariants: false,
            profile_atomics: false,
        }
    }
}

impl K4Config {
    /// Exact betweenness: every vertex is a source.
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn approx(k4approx: u32) -> Self {
        K4Config {
            k4approx: Some(k4approx),
            ..Self::default()
        }
    }

    pub fn workers(mut self, num_workers: usize) -> Self {
        self.num_workers = num_workers;
        self
    }

    pub fn chunk(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn batch_depth(mut self, batch_depth: usize) -> Self {
        self.batch_depth = batch_depth;
        self
    }

    pub fn filter(mut self, edge_filter: EdgeFilter) -> Self {
        self.edge_filter = edge_filter;
        self
    }

    pub fn scheduler(mut self, scheduler: Scheduler) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn source_seed(mut self, seed: u64) -> Self {
        self.source_seed = seed;
        self
    }

    pub fn checked(mut self) -> Self {
        self.check_invariants = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_workers == 0 {
            return Err(Error::config("at least one worker is required"));
        }
        if self.chunk_size == 0 {
            return Err(Error::config("chunk size must be at least 1"));
        }
        if self.batch_depth == 0 {
            return Err(Error::config("batch depth must be at least 1"));
        }
        if let EdgeFilter::WeightNotMultipleOf(m) = self.edge_filter {
            if m < 2 {
                return Err(Error::config("edge filter modulus must be at least 2"));
            }
        }
        Ok(())
    }
}

/// Traversal state of one source after BFS expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsState {
    pub source: VertexId,
    /// BFS depth, `-1` for unreached vertices.
    pub depth: Vec<i32>,
    /// Shortest-path counts from the source.
    pub sigma: Vec<u64>,
    /// Predecessors in discovery order. One entry per DAG edge, so parallel
    /// edges repeat a predecessor.
    pub preds: Vec<Vec<VertexId>>,
    /// Vertices in visitation order, level by level.
    pub visit_stack: Vec<VertexId>,
    /// Start of each level in `visit_stack`.
    pub level_starts: Vec<usize>,
    pub edges_traversed: u64,
}

/// A broken BFS invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BfsViolation {
    BadSource {
        source: VertexId,
    },
    StackOrder {
        position: usize,
    },
    UnreachedOnStack {
        vertex: VertexId,
    },
    NoPredecessor {
        vertex: VertexId,
    },
    PredecessorDepth {
        vertex: VertexId,
        pred: VertexId,
    },
    SigmaSum {
        vertex: VertexId,
        sigma: u64,
        pred_sum: u128,
    },
}

/// Read access to BFS results, shared by [`BfsState`] and the engine's
/// in-place workspace so both are checked by the same code.
pub(crate) trait BfsView {
    fn source(&self) -> VertexId;
    fn stack_len(&self) -> usize;
    fn stack_at(&self, i: usize) -> VertexId;
    fn depth(&self, v: VertexId) -> i32;
    fn sigma(&self, v: VertexId) -> u64;
    fn for_each_pred(&self, w: VertexId, f: &mut dyn FnMut(VertexId));
}

pub(crate) fn find_violations(view: &dyn BfsView) -> Vec<BfsViolation> {
    let mut out = Vec::new();
    let s = view.source();
    if view.stack_len() == 0 || view.stack_at(0) != s || view.depth(s) != 0 || view.sigma(s) != 1 {
        out.push(BfsViolation::BadSource { source: s });
    }
    let mut prev_depth = 0;
    for i in 0..view.stack_len() {
        let w = view.stack_at(i);
        let dw = view.depth(w);
        if dw < 0 {
            out.push(BfsViolation::UnreachedOnStack { vertex: w });
            continue;
        }
        if dw < prev_depth {
            out.push(BfsViolation::StackOrder { position: i });
        }
        prev_depth = dw;
        if dw == 0 {
            continue;
        }
        let mut count = 0usize;
        let mut sum = 0u128;
        view.for_each_pred(w, &mut |p| {
            count += 1;
            sum += view.sigma(p) as u128;
            if view.depth(p) + 1 != dw {
                out.push(BfsViolation::PredecessorDepth { vertex: w, pred: p });
            }
        });
        if count == 0 {
            out.push(BfsViolation::NoPredecessor { vertex: w });
        }
        if sum != view.sigma(w) as u128 {
            out.push(BfsViolation::SigmaSum {
                vertex: w,
                sigma: view.sigma(w),
                pred_sum: sum,
            });
        }
    }
    out
}

impl BfsView for BfsState {
    fn source(&self) -> VertexId {
        self.source
    }
    fn stack_len(&self) -> usize {
        self.visit_stack.len()
    }
    fn stack_at(&self, i: usize) -> VertexId {
        self.visit_stack[i]
    }
    fn depth(&self, v: VertexId) -> i32 {
        self.depth[v as usize]
    }
    fn sigma(&self, v: VertexId) -> u64 {
        self.sigma[v as usize]
    }
    fn for_each_pred(&self, w: VertexId, f: &mut dyn FnMut(VertexId)) {
        self.preds[w as usize].iter().copied().for_each(f)
    }
}

impl BfsState {
    /// Every broken invariant: source setup, stack ordered by depth,
    /// `d[p] + 1 == d[w]` for each predecessor, `sigma[w]` equal to the sum
    /// over predecessors.
    pub fn violations(&self) -> Vec<BfsViolation> {
        find_violations(self)
    }

    /// Predecessor lists sorted, for order-insensitive comparison.
    pub fn sorted_preds(&self) -> Vec<Vec<VertexId>> {
        self.preds
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort_unstable();
                p
            })
            .collect()
    }
}

/// Betweenness accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct BcScores {
    pub bc: Vec<f64>,
    /// Per-source dependency scratch; all zero between sources.
    pub delta: Vec<f64>,
}

impl BcScores {
    pub fn new(num_vertices: usize) -> Self {
        BcScores {
            bc: vec![0.0; num_vertices],
            delta: vec![0.0; num_vertices],
        }
    }
}

/// Counters and phase timings of one [`compute_bc`] run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct K4Report {
    pub sources: usize,
    /// Adjacency entries examined during BFS expansion, filtered or not.
    pub edges_traversed: u64,
    pub time_bfs: f64,
    pub time_backtrace: f64,
    /// Average per-worker time in the atomic-update stage; zero unless
    /// `profile_atomics` is set.
    pub time_atomic: f64,
    pub teps: f64,
    /// `time_bfs / time_backtrace`.
    pub bfs_backtrace_ratio: f64,
    /// `time_atomic / time_bfs`.
    pub atomic_share: f64,
    pub invariant_violations: u64,
}

impl K4Report {
    pub(crate) fn finish(&mut self) {
        let total = self.time_bfs + self.time_backtrace;
        self.teps = if total > 0.0 {
            self.edges_traversed as f64 / total
        } else {
            0.0
        };
        self.bfs_backtrace_ratio = if self.time_backtrace > 0.0 {
            self.time_bfs / self.time_backtrace
        } else {
            0.0
        };
        self.atomic_share = if self.time_bfs > 0.0 {
            self.time_atomic / self.time_bfs
        } else {
            0.0
        };
    }
}

/// Picks `2^k4approx` distinct sources with a ChaCha8 stream seeded by
/// `source_seed`. When that covers the graph (or `k4approx` is `None`),
/// returns every vertex in order.
pub fn select_sources(num_vertices: usize, cfg: &K4Config) -> Result<Vec<VertexId>> {
    let all = || (0..num_vertices as VertexId).collect();
    let Some(k) = cfg.k4approx else {
        return Ok(all());
    };
    let count = 1usize
        .checked_shl(k)
        .filter(|&c| c <= num_vertices)
        .ok_or_else(|| {
            Error::config(format!(
                "k4approx = {k} asks for more sources than the {num_vertices} vertices"
            ))
        })?;
    if count == num_vertices {
        return Ok(all());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.source_seed);
    Ok(index::sample(&mut rng, num_vertices, count)
        .into_iter()
        .map(|v| v as VertexId)
        .collect())
}

/// Runs the BFS phase alone from `source`.
pub fn bfs_expand(g: &CsrGraph, source: VertexId, cfg: &K4Config) -> Result<BfsState> {
    cfg.validate()?;
    if source as usize >= g.num_vertices() {
        return Err(Error::config(format!(
            "source {source} outside 0..{}",
            g.num_vertices()
        )));
    }
    let run = Engine::new(g, cfg)?.run(&[source], RunMode::BFS_SNAPSHOT)?;
    Ok(run
        .states
        .into_iter()
        .next()
        .expect("one source, one state"))
}

/// Back trace for one source, popping the visit stack and pushing into
/// predecessors. Adds `delta[w]` into `bc[w]` for every `w != source` and
/// leaves the source's dependencies in `scores.delta`.
pub fn back_trace(st: &BfsState, scores: &mut BcScores) {
    let delta = &mut scores.delta;
    delta.iter_mut().for_each(|d| *d = 0.0);
    for &w in st.visit_stack.iter().rev() {
        let sigma_w = st.sigma[w as usize];
        assert!(sigma_w > 0, "stacked vertex {w} has no shortest paths");
        let dw = delta[w as usize];
        for &v in &st.preds[w as usize] {
            delta[v as usize] += st.sigma[v as usize] as f64 / sigma_w as f64 * (1.0 + dw);
        }
        if w != st.source {
            scores.bc[w as usize] += dw;
        }
    }
}

/// Betweenness over the sources chosen by [`select_sources`].
pub fn compute_bc(g: &CsrGraph, cfg: &K4Config) -> Result<(BcScores, K4Report)> {
    let sources = select_sources(g.num_vertices(), cfg)?;
    compute_bc_for(g, &sources, cfg)
}

/// Betweenness restricted to an explicit source list.
pub fn compute_bc_for(
    g: &CsrGraph,
    sources: &[VertexId],
    cfg: &K4Config,
) -> Result<(BcScores, K4Report)> {
    let run = run_sources(g, sources, cfg, RunMode::FULL)?;
    Ok((run.scores, run.report))
}

/// [`compute_bc`] that also returns the BFS state of every source, in
/// source order. Memory grows with `sources * |V|`; meant for testing.
pub fn compute_bc_with_states(
    g: &CsrGraph,
    cfg: &K4Config,
) -> Result<(BcScores, K4Report, Vec<BfsState>)> {
    let sources = select_sources(g.num_vertices(), cfg)?;
    let run = run_sources(g, &sources, cfg, RunMode::FULL_SNAPSHOT)?;
    Ok((run.scores, run.report, run.states))
}

fn run_sources(
    g: &CsrGraph,
    sources: &[VertexId],
    cfg: &K4Config,
    mode: RunMode,
) -> Result<engine::RunOutput> {
    cfg.validate()?;
    if let Some(&bad) = sources.iter().find(|&&s| s as usize >= g.num_vertices()) {
        return Err(Error::config(format!(
            "source {bad} outside 0..{}",
            g.num_vertices()
        )));
    }
    Engine::new(g, cfg)?.run(sources, mode)
}
