use std::ops::Range;
use std::sync::atomic::{
    AtomicBool, AtomicI32, AtomicU32, AtomicU64, AtomicUsize, Ordering::Relaxed,
};
use std::thread;
use std::time::Instant;

use super::schedule::{claim_chunk, static_slice, FrontierCursor, Scheduler};
use super::{find_violations, BcScores, BfsState, BfsView, K4Config, K4Report};
use crate::graph::CsrGraph;
use crate::sync::{AtomicF64, SpinBarrier};
use crate::{Error, Result, VertexId};

#[derive(Debug, Clone, Copy)]
pub(super) struct RunMode {
    backtrace: bool,
    snapshot: bool,
}

impl RunMode {
    pub(super) const FULL: RunMode = RunMode {
        backtrace: true,
        snapshot: false,
    };
    pub(super) const FULL_SNAPSHOT: RunMode = RunMode {
        backtrace: true,
        snapshot: true,
    };
    pub(super) const BFS_SNAPSHOT: RunMode = RunMode {
        backtrace: false,
        snapshot: true,
    };
}

pub(super) struct RunOutput {
    pub(super) scores: BcScores,
    pub(super) report: K4Report,
    pub(super) states: Vec<BfsState>,
}

/// Path count and dependency of one vertex. The back trace reads both for
/// every DAG edge, so they share a cache line.
#[derive(Default)]
#[repr(C, align(16))]
struct PathSlot {
    sigma: AtomicU64,
    delta: AtomicF64,
}

/// Shared per-source workspace. Every array is indexed by vertex except
/// `preds` (one block per vertex, sized by its accepted in-degree) and
/// `stack` (visit order).
pub(super) struct Engine<'a> {
    g: &'a CsrGraph,
    cfg: &'a K4Config,
    depth: Vec<AtomicI32>,
    paths: Vec<PathSlot>,
    pred_offsets: Vec<usize>,
    pred_len: Vec<AtomicU32>,
    preds: Vec<AtomicU32>,
    bc: Vec<AtomicF64>,
    stack: Vec<AtomicU32>,
    tail: AtomicUsize,
    /// `tail` as of the last level barrier. Workers may already be
    /// appending the next level to `tail` when a slow one reads this.
    level_end: AtomicUsize,
    cursors: [FrontierCursor; 2],
    barrier: SpinBarrier,
    overflow: AtomicBool,
    edges_traversed: AtomicU64,
    atomic_nanos: AtomicU64,
}

/// Worker-private buffers.
struct Local {
    id: usize,
    step: usize,
    batch: Vec<Pending>,
    seen_depth: Vec<i32>,
    discovered: Vec<VertexId>,
    edges: u64,
    atomic_nanos: u64,
}

#[derive(Clone, Copy)]
struct Pending {
    v: VertexId,
    w: VertexId,
    sigma_v: u64,
}

/// What the leader (worker 0) hands back.
#[derive(Default)]
struct LeaderLog {
    time_bfs: f64,
    time_backtrace: f64,
    violations: u64,
    states: Vec<BfsState>,
    overflow_source: Option<VertexId>,
}

fn alloc<T>(len: usize, what: &'static str, f: impl Fn() -> T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::Alloc {
        what,
        bytes: len.saturating_mul(std::mem::size_of::<T>()),
    })?;
    v.resize_with(len, f);
    Ok(v)
}

impl<'a> Engine<'a> {
    pub(super) fn new(g: &'a CsrGraph, cfg: &'a K4Config) -> Result<Self> {
        let n = g.num_vertices();
        let mut pred_offsets = vec![0usize; n + 1];
        for (&w, &weight) in g.col_indices().iter().zip(g.weights()) {
            if cfg.edge_filter.accepts(weight) {
                pred_offsets[w as usize + 1] += 1;
            }
        }
        for v in 0..n {
            pred_offsets[v + 1] += pred_offsets[v];
        }
        let accepted = pred_offsets[n];
        Ok(Engine {
            g,
            cfg,
            depth: alloc(n, "depth array", || AtomicI32::new(-1))?,
            paths: alloc(n, "path counts", PathSlot::default)?,
            pred_offsets,
            pred_len: alloc(n, "predecessor cursors", || AtomicU32::new(0))?,
            preds: alloc(accepted, "predecessor lists", || AtomicU32::new(0))?,
            bc: alloc(n, "centrality scores", || AtomicF64::new(0.0))?,
            stack: alloc(n, "visit stack", || AtomicU32::new(0))?,
            tail: AtomicUsize::new(0),
            level_end: AtomicUsize::new(0),
            cursors: [FrontierCursor::new(0), FrontierCursor::new(0)],
            barrier: SpinBarrier::new(cfg.num_workers),
            overflow: AtomicBool::new(false),
            edges_traversed: AtomicU64::new(0),
            atomic_nanos: AtomicU64::new(0),
        })
    }

    pub(super) fn run(self, sources: &[VertexId], mode: RunMode) -> Result<RunOutput> {
        let workers = self.cfg.num_workers;
        let log = thread::scope(|s| {
            for id in 1..workers {
                let this = &self;
                s.spawn(move || {
                    this.worker(id, sources, mode);
                });
            }
            self.worker(0, sources, mode)
        });

        if let Some(source_vertex) = log.overflow_source {
            return Err(Error::SigmaOverflow { source_vertex });
        }
        let mut report = K4Report {
            sources: sources.len(),
            edges_traversed: self.edges_traversed.load(Relaxed),
            time_bfs: log.time_bfs,
            time_backtrace: log.time_backtrace,
            time_atomic: self.atomic_nanos.load(Relaxed) as f64 * 1e-9 / workers as f64,
            invariant_violations: log.violations,
            ..K4Report::default()
        };
        report.finish();
        let scores = BcScores {
            bc: self.bc.iter().map(AtomicF64::load).collect(),
            delta: self.paths.iter().map(|p| p.delta.load()).collect(),
        };
        Ok(RunOutput {
            scores,
            report,
            states: log.states,
        })
    }

    fn worker(&self, id: usize, sources: &[VertexId], mode: RunMode) -> LeaderLog {
        let leader = id == 0;
        let mut log = LeaderLog::default();
        let mut local = Local {
            id,
            step: 0,
            batch: Vec::with_capacity(self.cfg.batch_depth),
            seen_depth: Vec::with_capacity(self.cfg.batch_depth),
            discovered: Vec::new(),
            edges: 0,
            atomic_nanos: 0,
        };
        let mut level_starts = Vec::new();

        for &s in sources {
            let started = Instant::now();
            if leader {
                self.depth[s as usize].store(0, Relaxed);
                self.paths[s as usize].sigma.store(1, Relaxed);
                self.stack[0].store(s, Relaxed);
                self.tail.store(1, Relaxed);
                self.cursors[local.step % 2].reset(0);
            }
            self.barrier.wait();

            self.expand(&mut local, &mut level_starts);

            if leader {
                let bfs_done = Instant::now();
                log.time_bfs += (bfs_done - started).as_secs_f64();
                if self.overflow.load(Relaxed) && log.overflow_source.is_none() {
                    log.overflow_source = Some(s);
                }
                if self.cfg.check_invariants {
                    log.violations += find_violations(&self.view(s)).len() as u64;
                }
                if mode.snapshot {
                    log.states.push(self.snapshot(s, &level_starts));
                }
            }
            let extra_sync = self.cfg.check_invariants || mode.snapshot;
            if extra_sync {
                self.barrier.wait();
            }
            // every worker sees the same flag here, so all stop together
            if self.overflow.load(Relaxed) {
                break;
            }

            let backtrace_started = Instant::now();
            if mode.backtrace {
                if self.cfg.num_workers == 1 {
                    self.push_back_trace(s);
                } else {
                    self.pull_back_trace(&mut local, s, &level_starts);
                }
            }
            self.reset(&local);
            self.barrier.wait();
            if leader {
                log.time_backtrace += backtrace_started.elapsed().as_secs_f64();
            }
        }

        self.edges_traversed.fetch_add(local.edges, Relaxed);
        self.atomic_nanos.fetch_add(local.atomic_nanos, Relaxed);
        log
    }

    /// Hands out `range` under the configured scheduler. The cursor for the
    /// following step must be rewound by the barrier that ends this one.
    fn for_each_chunk(
        &self,
        local: &mut Local,
        range: Range<usize>,
        mut f: impl FnMut(&mut Local, Range<usize>),
    ) {
        let step = local.step;
        local.step += 1;
        match self.cfg.scheduler {
            Scheduler::Dynamic => {
                let cursor = &self.cursors[step % 2];
                while let Some(r) = claim_chunk(cursor, self.cfg.chunk_size, range.end) {
                    f(local, r);
                }
            }
            Scheduler::Static => {
                let r = static_slice(range, local.id, self.cfg.num_workers);
                f(local, r);
            }
        }
    }

    /// Level-synchronous BFS. On return `level_starts` holds the first stack
    /// position of every level and `tail` the number of reached vertices.
    fn expand(&self, local: &mut Local, level_starts: &mut Vec<usize>) {
        level_starts.clear();
        let (mut lo, mut hi) = (0usize, 1usize);
        let mut level = 0i32;
        loop {
            level_starts.push(lo);
            self.for_each_chunk(local, lo..hi, |local, r| self.expand_range(local, r, level));
            self.flush_discovered(local);
            let next = &self.cursors[local.step % 2];
            self.barrier.wait_with(|| {
                let end = self.tail.load(Relaxed);
                self.level_end.store(end, Relaxed);
                // an empty next level means the back trace starts one level up
                let levels = level_starts.len();
                next.reset(if end > hi || levels < 2 {
                    hi
                } else {
                    level_starts[levels - 2]
                });
            });
            lo = hi;
            hi = self.level_end.load(Relaxed);
            if lo == hi {
                break;
            }
            level += 1;
        }
    }

    fn expand_range(&self, local: &mut Local, range: Range<usize>, level: i32) {
        let col = self.g.col_indices();
        let weights = self.g.weights();
        let filter = self.cfg.edge_filter;
        for pos in range {
            // stage 1: load the neighbor index and weight
            let v = self.stack[pos].load(Relaxed);
            let sigma_v = self.paths[v as usize].sigma.load(Relaxed);
            let edges = self.g.edge_range(v);
            local.edges += edges.len() as u64;
            for e in edges {
                if !filter.accepts(weights[e]) {
                    continue;
                }
                local.batch.push(Pending {
                    v,
                    w: col[e],
                    sigma_v,
                });
                if local.batch.len() == self.cfg.batch_depth {
                    self.flush_batch(local, level);
                }
            }
        }
        self.flush_batch(local, level);
    }

    fn flush_batch(&self, local: &mut Local, level: i32) {
        if local.batch.is_empty() {
            return;
        }
        // stage 2: gather the scattered depths
        local.seen_depth.clear();
        local.seen_depth.extend(
            local
                .batch
                .iter()
                .map(|p| self.depth[p.w as usize].load(Relaxed)),
        );

        // stage 3: claim, accumulate, append
        let timer = self.cfg.profile_atomics.then(Instant::now);
        let next = level + 1;
        if self.cfg.num_workers == 1 {
            self.update_batch::<false>(local, next);
        } else {
            self.update_batch::<true>(local, next);
        }
        if let Some(t) = timer {
            local.atomic_nanos += t.elapsed().as_nanos() as u64;
        }
        local.batch.clear();
    }

    /// With `SHARED = false` there is exactly one writer, so plain loads and
    /// stores replace the read-modify-write instructions. Locked instructions
    /// fence, which keeps cache misses from overlapping.
    #[inline(always)]
    fn update_batch<const SHARED: bool>(&self, local: &mut Local, next: i32) {
        for (p, &seen) in local.batch.iter().zip(&local.seen_depth) {
            let w = p.w as usize;
            let mut dw = seen;
            if dw < 0 {
                let claimed = if SHARED {
                    match self.depth[w].compare_exchange(-1, next, Relaxed, Relaxed) {
                        Ok(_) => true,
                        Err(current) => {
                            dw = current;
                            false
                        }
                    }
                } else {
                    // the gathered depth is stale if `w` repeats in this batch
                    dw = self.depth[w].load(Relaxed);
                    if dw < 0 {
                        self.depth[w].store(next, Relaxed);
                    }
                    dw < 0
                };
                if claimed {
                    local.discovered.push(p.w);
                    dw = next;
                }
            }
            if dw == next {
                let (before, slot) = if SHARED {
                    (
                        self.paths[w].sigma.fetch_add(p.sigma_v, Relaxed),
                        self.pred_len[w].fetch_add(1, Relaxed),
                    )
                } else {
                    let before = self.paths[w].sigma.load(Relaxed);
                    self.paths[w]
                        .sigma
                        .store(before.wrapping_add(p.sigma_v), Relaxed);
                    let slot = self.pred_len[w].load(Relaxed);
                    self.pred_len[w].store(slot + 1, Relaxed);
                    (before, slot)
                };
                if before.checked_add(p.sigma_v).is_none() {
                    self.overflow.store(true, Relaxed);
                }
                let at = self.pred_offsets[w] + slot as usize;
                debug_assert!(at < self.pred_offsets[w + 1], "predecessor block overrun");
                self.preds[at].store(p.v, Relaxed);
            }
        }
    }

    fn flush_discovered(&self, local: &mut Local) {
        if local.discovered.is_empty() {
            return;
        }
        let at = self.tail.fetch_add(local.discovered.len(), Relaxed);
        for (slot, &w) in self.stack[at..].iter().zip(&local.discovered) {
            slot.store(w, Relaxed);
        }
        local.discovered.clear();
    }

    /// Single-worker back trace: pop the stack, push into predecessors.
    fn push_back_trace(&self, s: VertexId) {
        let visited = self.tail.load(Relaxed);
        for pos in (0..visited).rev() {
            let w = self.stack[pos].load(Relaxed) as usize;
            let sigma_w = self.paths[w].sigma.load(Relaxed);
            assert!(sigma_w > 0, "stacked vertex {w} has no shortest paths");
            let dw = self.paths[w].delta.load();
            let block = self.pred_offsets[w]
                ..self.pred_offsets[w] + self.pred_len[w].load(Relaxed) as usize;
            for slot in &self.preds[block] {
                let v = slot.load(Relaxed) as usize;
                let sigma_v = self.paths[v].sigma.load(Relaxed);
                let dv = &self.paths[v].delta;
                dv.store(dv.load() + sigma_v as f64 / sigma_w as f64 * (1.0 + dw));
            }
            if w != s as usize {
                let b = &self.bc[w];
                b.store(b.load() + dw);
            }
        }
    }

    /// Multi-worker back trace. Deepest level first; each vertex sums over
    /// its DAG successors, which all live one level deeper and are final.
    fn pull_back_trace(&self, local: &mut Local, s: VertexId, level_starts: &[usize]) {
        let visited = self.tail.load(Relaxed);
        let levels = level_starts.len();
        // the deepest level has no successors: delta stays 0
        for level in (0..levels.saturating_sub(1)).rev() {
            let range = level_starts[level]..level_starts[level + 1];
            let next_start = if level > 0 {
                level_starts[level - 1]
            } else {
                0
            };
            let child_depth = level as i32 + 1;
            self.for_each_chunk(local, range, |_, r| {
                for pos in r {
                    let v = self.stack[pos].load(Relaxed);
                    self.pull_one(v, s, child_depth);
                }
            });
            let next = &self.cursors[local.step % 2];
            self.barrier.wait_with(|| next.reset(next_start));
        }
        debug_assert!(levels == 0 || level_starts[levels - 1] < visited);
    }

    #[inline]
    fn pull_one(&self, v: VertexId, s: VertexId, child_depth: i32) {
        let col = self.g.col_indices();
        let weights = self.g.weights();
        let filter = self.cfg.edge_filter;
        let sigma_v = self.paths[v as usize].sigma.load(Relaxed) as f64;
        let mut acc = 0.0;
        for e in self.g.edge_range(v) {
            if !filter.accepts(weights[e]) {
                continue;
            }
            let w = col[e] as usize;
            if self.depth[w].load(Relaxed) == child_depth {
                let sigma_w = self.paths[w].sigma.load(Relaxed);
                acc += sigma_v / sigma_w as f64 * (1.0 + self.paths[w].delta.load());
            }
        }
        self.paths[v as usize].delta.store(acc);
        if v != s {
            let b = &self.bc[v as usize];
            b.store(b.load() + acc);
        }
    }

    /// Clears the entries touched by the last source. Callers must have
    /// passed a barrier since the last read of the workspace.
    fn reset(&self, local: &Local) {
        let visited = self.tail.load(Relaxed);
        for pos in static_slice(0..visited, local.id, self.cfg.num_workers) {
            let v = self.stack[pos].load(Relaxed) as usize;
            self.depth[v].store(-1, Relaxed);
            self.paths[v].sigma.store(0, Relaxed);
            self.pred_len[v].store(0, Relaxed);
            self.paths[v].delta.store(0.0);
        }
    }

    fn view(&self, s: VertexId) -> EngineView<'_, 'a> {
        EngineView {
            engine: self,
            source: s,
        }
    }

    fn snapshot(&self, s: VertexId, level_starts: &[usize]) -> BfsState {
        let n = self.g.num_vertices();
        let visited = self.tail.load(Relaxed);
        let mut preds = vec![Vec::new(); n];
        for (v, list) in preds.iter_mut().enumerate() {
            let len = self.pred_len[v].load(Relaxed) as usize;
            let start = self.pred_offsets[v];
            list.extend(
                self.preds[start..start + len]
                    .iter()
                    .map(|p| p.load(Relaxed)),
            );
        }
        BfsState {
            source: s,
            depth: self.depth.iter().map(|d| d.load(Relaxed)).collect(),
            sigma: self.paths.iter().map(|p| p.sigma.load(Relaxed)).collect(),
            preds,
            visit_stack: self.stack[..visited]
                .iter()
                .map(|x| x.load(Relaxed))
                .collect(),
            level_starts: level_starts.to_vec(),
            edges_traversed: self.edges_for(&self.stack[..visited]),
        }
    }

    fn edges_for(&self, stack: &[AtomicU32]) -> u64 {
        stack
            .iter()
            .map(|v| self.g.out_degree(v.load(Relaxed)) as u64)
            .sum()
    }
}

struct EngineView<'e, 'a> {
    engine: &'e Engine<'a>,
    source: VertexId,
}

impl BfsView for EngineView<'_, '_> {
    fn source(&self) -> VertexId {
        self.source
    }
    fn stack_len(&self) -> usize {
        self.engine.tail.load(Relaxed)
    }
    fn stack_at(&self, i: usize) -> VertexId {
        self.engine.stack[i].load(Relaxed)
    }
    fn depth(&self, v: VertexId) -> i32 {
        self.engine.depth[v as usize].load(Relaxed)
    }
    fn sigma(&self, v: VertexId) -> u64 {
        self.engine.paths[v as usize].sigma.load(Relaxed)
    }
    fn for_each_pred(&self, w: VertexId, f: &mut dyn FnMut(VertexId)) {
        let w = w as usize;
        let start = self.engine.pred_offsets[w];
        let len = self.engine.pred_len[w].load(Relaxed) as usize;
        for p in &self.engine.preds[start..start + len] {
            f(p.load(Relaxed));
        }
    }
}
