//! HPCC RandomAccess (GUPS).
//!
//! A table of `2^n` 64-bit words starts as `T[i] = i` and receives `4 * 2^n`
//! updates `T[a >> (64 - n)] ^= a` with `a` drawn from [`Gf2Stream`]. The
//! stream is split into one contiguous segment per worker. Each worker keeps
//! `queues_per_worker` fetched batches of `batch_len` values in flight and
//! services them round-robin, so at most `batch_len * queues_per_worker`
//! values are buffered ahead of the table, which must stay within
//! [`LOOK_AHEAD_LIMIT`].
//!
//! In [`UpdateMode::Relaxed`] an update is an unsynchronized load, xor and
//! store; concurrent workers can lose each other's updates and the loss is
//! charged to the error budget ([`ERROR_BUDGET`]). [`UpdateMode::Atomic`] uses
//! `fetch_xor` and is lossless.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use crate::gf2_stream::Gf2Stream;
use crate::{Error, Result};

/// Maximum number of stream values a worker may hold ahead of processing.
pub const LOOK_AHEAD_LIMIT: usize = 1024;

/// Largest tolerated fraction of wrong table entries.
pub const ERROR_BUDGET: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    #[default]
    Relaxed,
    Atomic,
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            UpdateMode::Relaxed => "relaxed",
            UpdateMode::Atomic => "atomic",
        })
    }
}

impl FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed" => Ok(UpdateMode::Relaxed),
            "atomic" => Ok(UpdateMode::Atomic),
            other => Err(Error::config(format!("unknown update mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GupsConfig {
    /// Table size exponent.
    pub n: u32,
    pub num_workers: usize,
    /// Values fetched per batch (queue length).
    pub batch_len: usize,
    /// Batches a worker keeps in flight (queue number).
    pub queues_per_worker: usize,
    pub update_mode: UpdateMode,
    /// Stream length override. `None` means the standard `4 * 2^n`.
    pub updates: Option<u64>,
}

impl GupsConfig {
    /// Single worker, 4 queues of 16, relaxed updates, full-length stream.
    pub fn new(n: u32) -> Self {
        GupsConfig {
            n,
            num_workers: 1,
            batch_len: 16,
            queues_per_worker: 4,
            update_mode: UpdateMode::Relaxed,
            updates: None,
        }
    }

    pub fn workers(mut self, num_workers: usize) -> Self {
        self.num_workers = num_workers;
        self
    }

    pub fn batch(mut self, batch_len: usize) -> Self {
        self.batch_len = batch_len;
        self
    }

    pub fn queues(mut self, queues_per_worker: usize) -> Self {
        self.queues_per_worker = queues_per_worker;
        self
    }

    pub fn mode(mut self, update_mode: UpdateMode) -> Self {
        self.update_mode = update_mode;
        self
    }

    pub fn updates(mut self, updates: u64) -> Self {
        self.updates = Some(updates);
        self
    }

    /// Number of stream values applied to the table.
    pub fn stream_len(&self) -> u64 {
        self.updates.unwrap_or(4u64 << self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=62).contains(&self.n) {
            return Err(Error::config(format!(
                "table exponent n = {} outside 1..=62",
                self.n
            )));
        }
        if self.num_workers == 0 {
            return Err(Error::config("at least one worker is required"));
        }
        if self.batch_len == 0 || self.queues_per_worker == 0 {
            return Err(Error::config(
                "batch length and queue count must be positive",
            ));
        }
        let look_ahead = self.batch_len.saturating_mul(self.queues_per_worker);
        if look_ahead > LOOK_AHEAD_LIMIT {
            return Err(Error::config(format!(
                "look-ahead {} x {} = {look_ahead} exceeds {LOOK_AHEAD_LIMIT}",
                self.batch_len, self.queues_per_worker
            )));
        }
        Ok(())
    }
}

/// The `2^n` entry table under test.
pub struct UpdateTable {
    entries: Box<[AtomicU64]>,
    n: u32,
}

impl UpdateTable {
    /// Allocates the table and sets `T[i] = i`.
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=62).contains(&n) {
            return Err(Error::config(format!(
                "table exponent n = {n} outside 1..=62"
            )));
        }
        let len = 1usize << n;
        let mut entries = Vec::new();
        entries.try_reserve_exact(len).map_err(|_| Error::Alloc {
            what: "update table",
            bytes: len.saturating_mul(8),
        })?;
        entries.extend((0..len as u64).map(AtomicU64::new));
        Ok(UpdateTable {
            entries: entries.into_boxed_slice(),
            n,
        })
    }

    pub(crate) fn from_values(n: u32, values: Vec<u64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << n);
        UpdateTable {
            entries: values.into_iter().map(AtomicU64::new).collect(),
            n,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i].load(Ordering::Relaxed)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|e| e.load(Ordering::Relaxed))
            .collect()
    }
}

impl fmt::Debug for UpdateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UpdateTable")
            .field("n", &self.n)
            .field("len", &self.len())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GupsResult {
    /// Seconds spent in the update phase.
    pub elapsed: f64,
    pub updates: u64,
    pub gups: f64,
    pub error_count: u64,
    pub error_fraction: f64,
}

impl GupsResult {
    pub fn within_budget(&self) -> bool {
        self.error_fraction <= ERROR_BUDGET
    }
}

/// Top `n` bits of `a`.
#[inline(always)]
pub fn table_index(a: u64, n: u32) -> usize {
    debug_assert!((1..=63).contains(&n));
    (a >> (64 - n)) as usize
}

/// Allocates a fresh table, runs the update phase, then verifies.
pub fn run_gups(cfg: &GupsConfig) -> Result<GupsResult> {
    cfg.validate()?;
    let table = UpdateTable::new(cfg.n)?;
    let elapsed = apply_updates(cfg, &table)?;
    let error_count = verify_table(&table, cfg.stream_len());
    let updates = cfg.stream_len();
    let secs = elapsed.as_secs_f64();
    Ok(GupsResult {
        elapsed: secs,
        updates,
        gups: if secs > 0.0 {
            updates as f64 / secs / 1e9
        } else {
            0.0
        },
        error_count,
        error_fraction: error_count as f64 / table.len() as f64,
    })
}

/// Runs only the timed update phase against `table`.
pub fn apply_updates(cfg: &GupsConfig, table: &UpdateTable) -> Result<Duration> {
    cfg.validate()?;
    if table.n() != cfg.n {
        return Err(Error::config(format!(
            "table has n = {} but config has n = {}",
            table.n(),
            cfg.n
        )));
    }
    let total = cfg.stream_len();
    let workers = cfg.num_workers as u64;
    let start = Instant::now();
    if cfg.num_workers == 1 {
        update_segment(cfg, table, 0, total);
    } else {
        thread::scope(|s| {
            for w in 0..workers {
                let begin = segment_start(total, workers, w);
                let end = segment_start(total, workers, w + 1);
                s.spawn(move || update_segment(cfg, table, begin, end - begin));
            }
        });
    }
    Ok(start.elapsed())
}

/// First stream index of worker `w`'s segment.
pub fn segment_start(total: u64, workers: u64, w: u64) -> u64 {
    ((total as u128 * w as u128) / workers as u128) as u64
}

struct Queue {
    values: Vec<u64>,
    len: usize,
}

fn update_segment(cfg: &GupsConfig, table: &UpdateTable, start: u64, count: u64) {
    let mut stream = Gf2Stream::seek(start);
    let mut unfetched = count;
    let mut fetch = |q: &mut Queue| {
        let take = (cfg.batch_len as u64).min(unfetched) as usize;
        stream.fill(&mut q.values[..take]);
        q.len = take;
        unfetched -= take as u64;
    };

    let mut queues: Vec<Queue> = (0..cfg.queues_per_worker)
        .map(|_| Queue {
            values: vec![0; cfg.batch_len],
            len: 0,
        })
        .collect();
    for q in queues.iter_mut() {
        fetch(q);
    }
    let mut indices = vec![0usize; cfg.batch_len];
    let entries = &table.entries;
    let n = cfg.n;
    loop {
        let mut applied_any = false;
        for q in queues.iter_mut() {
            if q.len == 0 {
                continue;
            }
            applied_any = true;
            let batch = &q.values[..q.len];
            for (slot, &a) in indices.iter_mut().zip(batch) {
                *slot = table_index(a, n);
            }
            match cfg.update_mode {
                UpdateMode::Relaxed => {
                    for (&i, &a) in indices.iter().zip(batch) {
                        let e = &entries[i];
                        e.store(e.load(Ordering::Relaxed) ^ a, Ordering::Relaxed);
                    }
                }
                UpdateMode::Atomic => {
                    for (&i, &a) in indices.iter().zip(batch) {
                        entries[i].fetch_xor(a, Ordering::Relaxed);
                    }
                }
            }
            fetch(q);
        }
        if !applied_any {
            break;
        }
    }
}

/// Counts entries that differ from a lossless sequential application of the
/// first `stream_len` stream values.
///
/// Works on a copy: XOR is self-inverse, so replaying the stream over the
/// result leaves `T[i] = i` exactly where no update was lost.
pub fn verify_table(table: &UpdateTable, stream_len: u64) -> u64 {
    let mut values = table.to_vec();
    let n = table.n();
    let mut stream = Gf2Stream::new();
    for _ in 0..stream_len {
        let a = stream.next();
        values[table_index(a, n)] ^= a;
    }
    values
        .iter()
        .enumerate()
        .filter(|&(i, &v)| v != i as u64)
        .count() as u64
}
