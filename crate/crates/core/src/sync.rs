use std::hint;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::thread;

/// Reusable barrier that spins briefly and then yields.
///
/// BFS levels are often tiny, so a condvar round trip per level would
/// dominate; yielding keeps oversubscribed runs (more workers than cores)
/// from starving the workers that still have work.
pub(crate) struct SpinBarrier {
    parties: usize,
    arrived: AtomicUsize,
    generation: AtomicU64,
}

const SPINS_BEFORE_YIELD: u32 = 256;

impl SpinBarrier {
    pub(crate) fn new(parties: usize) -> Self {
        assert!(parties > 0);
        SpinBarrier {
            parties,
            arrived: AtomicUsize::new(0),
            generation: AtomicU64::new(0),
        }
    }

    /// Blocks until all parties arrive. Returns `true` for exactly one caller.
    pub(crate) fn wait(&self) -> bool {
        self.wait_with(|| ())
    }

    /// Like [`wait`](Self::wait), but the last party to arrive runs `publish`
    /// before anyone is released.
    pub(crate) fn wait_with(&self, publish: impl FnOnce()) -> bool {
        if self.parties == 1 {
            publish();
            return true;
        }
        let gen = self.generation.load(Ordering::Acquire);
        if self.arrived.fetch_add(1, Ordering::AcqRel) + 1 == self.parties {
            publish();
            self.arrived.store(0, Ordering::Relaxed);
            self.generation.fetch_add(1, Ordering::AcqRel);
            return true;
        }
        let mut spins = 0u32;
        while self.generation.load(Ordering::Acquire) == gen {
            if spins < SPINS_BEFORE_YIELD {
                hint::spin_loop();
                spins += 1;
            } else {
                thread::yield_now();
            }
        }
        false
    }
}

/// `f64` stored as bits in an `AtomicU64`.
#[derive(Default)]
#[repr(transparent)]
pub(crate) struct AtomicF64(AtomicU64);

impl AtomicF64 {
    pub(crate) fn new(v: f64) -> Self {
        AtomicF64(AtomicU64::new(v.to_bits()))
    }

    #[inline]
    pub(crate) fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub(crate) fn store(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;

    #[test]
    fn barrier_separates_phases() {
        const WORKERS: usize = 4;
        const ROUNDS: usize = 200;
        let barrier = SpinBarrier::new(WORKERS);
        let counter = AtomicUsize::new(0);
        thread::scope(|s| {
            for _ in 0..WORKERS {
                s.spawn(|| {
                    for round in 0..ROUNDS {
                        counter.fetch_add(1, Ordering::Relaxed);
                        barrier.wait();
                        assert_eq!(counter.load(Ordering::Relaxed), (round + 1) * WORKERS);
                        barrier.wait();
                    }
                });
            }
        });
    }

    #[test]
    fn exactly_one_leader_per_round() {
        let barrier = SpinBarrier::new(3);
        let leaders = AtomicUsize::new(0);
        thread::scope(|s| {
            for _ in 0..3 {
                s.spawn(|| {
                    for _ in 0..50 {
                        if barrier.wait() {
                            leaders.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                });
            }
        });
        assert_eq!(leaders.load(Ordering::Relaxed), 50);
    }
}
