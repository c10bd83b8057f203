//! Counter-based pseudo-random streams.
//!
//! Instead of one mutable generator threaded through the simulation, each
//! (stream, entity, step) tuple owns an independent stream indexed by a
//! draw counter: `value = prf(seed, stream, entity, step, draw)`. Two
//! consequences matter here:
//!
//! * partitioning an agent array across workers cannot change any draw,
//!   because no draw depends on who else consumed the generator;
//! * replays are stable across platforms — the mixer is fixed-width
//!   integer arithmetic only.
//!
//! The PRF is the splitmix64 finalizer over a keyed counter. It is not
//! cryptographic; it is statistically solid for simulation and test use.

/// Weyl increment used by splitmix64.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse a word into an accumulated key. Each word is pre-whitened so
/// that low-entropy inputs (small ids, small step numbers) still flip the
/// whole key.
#[inline]
fn absorb(acc: u64, word: u64) -> u64 {
    mix64(acc ^ word.wrapping_mul(GOLDEN).rotate_left(23))
}

/// Derive a module seed from the global seed and a label, so modules can
/// be re-seeded independently without coordinating numeric offsets.
pub fn labeled_seed(global_seed: u64, label: &str) -> u64 {
    // FNV-1a over the label bytes, then keyed into the global seed.
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in label.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    absorb(absorb(global_seed, h), label.len() as u64)
}

/// One independent random stream, keyed by (seed, stream, entity, step)
/// and indexed by a draw counter.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    ctr: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64, entity: u64, step: u64) -> Self {
        let key = absorb(absorb(absorb(seed, stream), entity), step);
        Self { key, ctr: 0 }
    }

    /// Draws issued so far; part of checkpointable state.
    pub fn draws(&self) -> u64 {
        self.ctr
    }

    pub fn skip_to(&mut self, draw: u64) {
        self.ctr = draw;
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = mix64(self.key.wrapping_add(self.ctr.wrapping_mul(GOLDEN)));
        self.ctr += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`. `lo == hi` returns `lo`.
    #[inline]
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`. Modulo bias is below 2^-32 for every
    /// `n` used in this crate (all far below 2^32).
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    #[inline]
    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    #[inline]
    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Exponential inter-arrival gap with the given rate (events per unit
    /// time). Used by the Poisson-process schedulers.
    #[inline]
    pub fn next_exp(&mut self, rate: f64) -> f64 {
        debug_assert!(rate > 0.0);
        // 1 - U avoids ln(0).
        -libm::log(1.0 - self.next_f64()) / rate
    }
}
