//! Seeded random stream with a fixed, portable derivation.
//!
//! * Generator: ChaCha8 keyed with the seed as 8 little-endian bytes followed
//!   by 24 zero bytes, stream 0, word position 0.
//! * `unit()`: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`.
//! * `uniform(lo, hi)`: `lo + (hi - lo) * unit()`.
//! * `normal(mean, sd)`: Box–Muller cosine branch,
//!   `sqrt(-2 ln(1 - u1)) * cos(2π u2)` with `u1`, `u2` drawn in that order;
//!   the sine branch is discarded.
//! * `index(n)`: `floor(unit() * n)`.
//!
//! Any implementation following these rules reproduces the same scenarios.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        let z = libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2);
        mean + std_dev * z
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = libm::floor(self.unit() * n as f64) as usize;
        i.min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Stream::new(7);
        let mut b = Stream::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(Stream::new(7).next_u64(), Stream::new(8).next_u64());
    }

    #[test]
    fn unit_and_index_ranges() {
        let mut s = Stream::new(1);
        for _ in 0..10_000 {
            let u = s.unit();
            assert!((0.0..1.0).contains(&u));
            assert!(s.index(3) < 3);
        }
    }

    #[test]
    fn normal_moments() {
        let mut s = Stream::new(3);
        let n = 200_000;
        let xs: std::vec::Vec<f64> = (0..n).map(|_| s.normal(10.0, 3.0)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 10.0).abs() < 0.05, "mean {mean}");
        assert!((var.sqrt() - 3.0).abs() < 0.05, "sd {}", var.sqrt());
    }
}
