//! Seeded random streams.
//!
//! Every source of randomness draws from its own ChaCha8 stream derived from
//! `(seed, purpose, index)`, so adding draws in one place never shifts another.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A deterministic random stream.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, purpose: &str, index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = splitmix64(seed ^ fnv1a(purpose));
        s = splitmix64(s ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
        for chunk in key.chunks_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        Stream { rng: ChaCha8Rng::from_seed(key) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    #[inline]
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n` (unbiased). `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: alloc::vec::Vec<u64> = (0..4).map({
            let mut s = Stream::new(7, "x", 0);
            move |_| s.next_u64()
        }).collect();
        let mut s = Stream::new(7, "x", 0);
        for v in &a {
            assert_eq!(*v, s.next_u64());
        }
        let mut t = Stream::new(7, "y", 0);
        assert_ne!(a[0], t.next_u64());
        let mut u = Stream::new(7, "x", 1);
        assert_ne!(a[0], u.next_u64());
    }

    #[test]
    fn uniform_in_range() {
        let mut s = Stream::new(1, "u", 0);
        for _ in 0..1000 {
            let x = s.uniform_range(2.0, 3.0);
            assert!((2.0..3.0).contains(&x));
            assert!(s.below(5) < 5);
        }
    }
}
