//! Work distribution over a BFS level.
//!
//! A level is a contiguous range of the visit stack. [`Scheduler::Static`]
//! hands each worker one equal slice up front; [`Scheduler::Dynamic`] lets
//! workers repeatedly claim `chunk_size` vertices from a shared cursor, so a
//! worker stuck on a high-degree vertex does not hold up the rest.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduler {
    /// Chunked claiming from a shared cursor.
    #[default]
    Dynamic,
    /// Even split of each level, decided before any work starts.
    Static,
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Scheduler::Dynamic => "dynamic",
            Scheduler::Static => "static",
        })
    }
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(Scheduler::Dynamic),
            "static" => Ok(Scheduler::Static),
            other => Err(Error::config(format!("unknown scheduler `{other}`"))),
        }
    }
}

/// Shared claim cursor over one level of the frontier.
#[derive(Debug, Default)]
pub struct FrontierCursor {
    next: AtomicUsize,
}

impl FrontierCursor {
    pub fn new(start: usize) -> Self {
        FrontierCursor {
            next: AtomicUsize::new(start),
        }
    }

    /// Rewinds the cursor. Must not race with [`claim_chunk`] on the same
    /// cursor.
    pub fn reset(&self, start: usize) {
        self.next.store(start, Ordering::Relaxed);
    }
}

/// Claims up to `chunk_size` positions below `end`, or `None` once the level
/// is exhausted.
#[inline]
pub fn claim_chunk(cursor: &FrontierCursor, chunk_size: usize, end: usize) -> Option<Range<usize>> {
    debug_assert!(chunk_size >= 1);
    // the load avoids pushing an exhausted cursor further past `end`
    if cursor.next.load(Ordering::Relaxed) >= end {
        return None;
    }
    let start = cursor.next.fetch_add(chunk_size, Ordering::Relaxed);
    if start >= end {
        None
    } else {
        Some(start..(start + chunk_size).min(end))
    }
}

/// Worker `id`'s share of `range` under an even split.
pub fn static_slice(range: Range<usize>, id: usize, workers: usize) -> Range<usize> {
    let len = range.end - range.start;
    let lo = range.start + len * id / workers;
    let hi = range.start + len * (id + 1) / workers;
    lo..hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;
    use std::thread;

    #[test]
    fn exhausted_cursor_is_empty() {
        let c = FrontierCursor::new(10);
        assert_eq!(claim_chunk(&c, 4, 10), None);
    }

    #[test]
    fn single_worker_chunks() {
        let c = FrontierCursor::new(0);
        let mut got = Vec::new();
        while let Some(r) = claim_chunk(&c, 4, 10) {
            got.push(r);
        }
        assert_eq!(got, vec![0..4, 4..8, 8..10]);
    }

    #[test]
    fn concurrent_claims_partition_range() {
        for (n, chunk) in [(10_000, 1), (10_000, 7), (12_345, 64), (3, 8)] {
            let c = FrontierCursor::new(0);
            let claimed = Mutex::new(Vec::new());
            thread::scope(|s| {
                for _ in 0..8 {
                    s.spawn(|| {
                        let mut mine = Vec::new();
                        while let Some(r) = claim_chunk(&c, chunk, n) {
                            mine.push(r);
                        }
                        claimed.lock().unwrap().extend(mine);
                    });
                }
            });
            let mut ranges = claimed.into_inner().unwrap();
            ranges.sort_by_key(|r| r.start);
            let mut expect = 0;
            for r in &ranges {
                assert_eq!(r.start, expect, "gap or overlap");
                assert!(r.end > r.start && r.end - r.start <= chunk);
                expect = r.end;
            }
            assert_eq!(expect, n);
        }
    }

    #[test]
    fn static_slices_cover_range() {
        for workers in 1..9 {
            let mut expect = 5;
            for id in 0..workers {
                let s = static_slice(5..42, id, workers);
                assert_eq!(s.start, expect);
                expect = s.end;
            }
            assert_eq!(expect, 42);
        }
    }
}
