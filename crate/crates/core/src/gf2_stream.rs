//! The GUPS update stream.
//!
//! A 64-bit Galois shift register over GF(2): each step multiplies the state
//! by `x` and folds the overflowing top bit back in through the taps
//! `X^2 + X + 1`. Bit 63 is the feedback tap, so the register arithmetic is
//! multiplication by `x` modulo `x^64 + x^2 + x + 1`, which lets us jump
//! ahead in `O(log k)` by exponentiating `x`.

/// Low-bit image of the feedback taps `X^2 + X + 1`.
pub const FEEDBACK: u64 = 0x7;

/// Seed every canonical stream starts from.
pub const CANONICAL_SEED: u64 = 1;

/// A position in the GUPS pseudo-random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2Stream {
    state: u64,
    index: u64,
}

impl Gf2Stream {
    /// The canonical stream at index 0.
    pub const fn new() -> Self {
        Gf2Stream {
            state: CANONICAL_SEED,
            index: 0,
        }
    }

    /// A stream starting from an arbitrary nonzero state.
    ///
    /// # Panics
    /// If `state` is zero; the register would stay at zero forever.
    pub fn from_state(state: u64) -> Self {
        assert!(state != 0, "a zero state never leaves zero");
        Gf2Stream { state, index: 0 }
    }

    /// The canonical stream after `start_index` steps.
    pub fn seek(start_index: u64) -> Self {
        let mut s = Self::new();
        s.advance(start_index);
        s
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Number of steps taken since the seed.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Steps the register and returns the new state.
    #[inline(always)]
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> u64 {
        self.state = step(self.state);
        self.index = self.index.wrapping_add(1);
        self.state
    }

    /// Skips `steps` values without producing them.
    pub fn advance(&mut self, steps: u64) {
        self.state = mul_mod(self.state, x_pow(steps));
        self.index = self.index.wrapping_add(steps);
    }

    /// Fills `out` with the next `out.len()` values.
    #[inline]
    pub fn fill(&mut self, out: &mut [u64]) {
        let mut s = self.state;
        for slot in out.iter_mut() {
            s = step(s);
            *slot = s;
        }
        self.state = s;
        self.index = self.index.wrapping_add(out.len() as u64);
    }
}

impl Default for Gf2Stream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for Gf2Stream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        Some(Gf2Stream::next(self))
    }
}

#[inline(always)]
fn step(state: u64) -> u64 {
    // arithmetic shift smears bit 63 into a full mask
    (state << 1) ^ (((state as i64) >> 63) as u64 & FEEDBACK)
}

/// `a * b mod (x^64 + x^2 + x + 1)` by Horner's rule over the bits of `b`.
fn mul_mod(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    for bit in (0..64).rev() {
        acc = step(acc);
        if (b >> bit) & 1 == 1 {
            acc ^= a;
        }
    }
    acc
}

/// `x^k mod (x^64 + x^2 + x + 1)` by square-and-multiply.
fn x_pow(mut k: u64) -> u64 {
    let mut result = 1u64;
    let mut base = 2u64; // x
    while k > 0 {
        if k & 1 == 1 {
            result = mul_mod(result, base);
        }
        base = mul_mod(base, base);
        k >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Register step written with 128-bit arithmetic instead of bit tricks.
    fn wide_step(v: u64) -> u64 {
        let doubled = (v as u128) * 2;
        if doubled >= 1u128 << 64 {
            ((doubled - (1u128 << 64)) as u64) ^ 0b111
        } else {
            doubled as u64
        }
    }

    #[test]
    fn shift_without_feedback() {
        assert_eq!(Gf2Stream::from_state(1).next(), 2);
    }

    #[test]
    fn feedback_on_top_bit() {
        assert_eq!(Gf2Stream::from_state(0x8000_0000_0000_0000).next(), 7);
    }

    #[test]
    fn sixty_four_steps_from_one() {
        let mut oracle = 1u64;
        for _ in 0..64 {
            oracle = wide_step(oracle);
        }
        // x^64 = x^2 + x + 1
        assert_eq!(oracle, 7);
        let mut s = Gf2Stream::new();
        let mut last = 0;
        for _ in 0..64 {
            last = s.next();
        }
        assert_eq!(last, oracle);
        assert_eq!(s.index(), 64);
    }

    #[test]
    fn seek_zero_is_seed() {
        assert_eq!(Gf2Stream::seek(0), Gf2Stream::new());
    }

    #[test]
    fn seek_matches_replay_up_to_1000() {
        let mut oracle = 1u64;
        for k in 1..=1000u64 {
            oracle = wide_step(oracle);
            let s = Gf2Stream::seek(k);
            assert_eq!(s.state(), oracle, "k = {k}");
            assert_eq!(s.index(), k);
        }
    }

    #[test]
    fn fill_matches_next() {
        let mut a = Gf2Stream::seek(12345);
        let mut b = a;
        let mut buf = [0u64; 37];
        a.fill(&mut buf);
        for v in buf {
            assert_eq!(v, b.next());
        }
        assert_eq!(a, b);
    }

    #[test]
    fn mul_mod_is_commutative_and_has_identity() {
        for (a, b) in [(3u64, 0xdead_beefu64), (u64::MAX, 0x8000_0000_0000_0001)] {
            assert_eq!(mul_mod(a, b), mul_mod(b, a));
            assert_eq!(mul_mod(a, 1), a);
        }
    }

    proptest! {
        #[test]
        fn seek_composes(a in 0u64..1 << 40, b in 0u64..1 << 40) {
            let mut s = Gf2Stream::seek(a);
            s.advance(b);
            prop_assert_eq!(s, Gf2Stream::seek(a + b));
        }

        #[test]
        fn nonzero_state_stays_nonzero(seed in 1u64.., steps in 0u64..512) {
            let mut s = Gf2Stream::from_state(seed);
            for _ in 0..steps {
                prop_assert_ne!(s.next(), 0);
            }
        }
    }
}
