//! Counter-based random streams.
//!
//! Every draw is a pure function of `(master seed, tag, particle, step, k)`
//! where `k` counts draws inside one stream. Nothing is carried between
//! steps, so a trajectory does not depend on the number of worker threads or
//! the order in which particles are visited, and two runs can share the same
//! Brownian increments by sharing keys.
//!
//! The per-stream generator is the SplitMix64 sequence started at a hashed
//! key.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn fmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose of a stream. Streams with different tags never share keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Tag {
    InitPositions = 1,
    InitVelocities = 2,
    Partition = 3,
    Langevin = 4,
    Andersen = 5,
    /// Fine-grid Brownian increments shared by coupled runs.
    Tape = 6,
    Estimator = 7,
}

/// Keyed family of random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// A stream whose draws depend only on the key.
    pub fn stream(&self, tag: Tag, particle: u64, step: u64) -> Stream {
        let mut k = fmix(self.master_seed.wrapping_add(GOLDEN));
        k = fmix(k ^ (tag as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
        k = fmix(k ^ particle.wrapping_mul(0xA076_1D64_78BD_642F));
        k = fmix(k ^ step.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        Stream { state: k }
    }

    /// Derive an independent family, e.g. one per repetition.
    pub fn fork(&self, index: u64) -> RngStream {
        RngStream::new(fmix(self.master_seed ^ fmix(index.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }
}

/// One keyed stream. Cheap to create; meant to live for a handful of draws.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Uniform on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Standard normal vector; components at index `dim` and beyond are zero.
    #[inline]
    pub fn normal3(&mut self, dim: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for c in out.iter_mut().take(dim) {
            *c = self.normal();
        }
        out
    }
}

impl RngCore for Stream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        fmix(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_draws() {
        let r = RngStream::new(42);
        let a: Vec<u64> = (0..8).map({
            let mut s = r.stream(Tag::Langevin, 3, 17);
            move |_| s.next_u64()
        })
        .collect();
        let mut s = r.stream(Tag::Langevin, 3, 17);
        let b: Vec<u64> = (0..8).map(|_| s.next_u64()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn keys_are_separated() {
        let r = RngStream::new(42);
        let base = r.stream(Tag::Langevin, 3, 17).next_u64();
        assert_ne!(base, r.stream(Tag::Andersen, 3, 17).next_u64());
        assert_ne!(base, r.stream(Tag::Langevin, 4, 17).next_u64());
        assert_ne!(base, r.stream(Tag::Langevin, 3, 18).next_u64());
        assert_ne!(base, RngStream::new(43).stream(Tag::Langevin, 3, 17).next_u64());
        assert_ne!(r.fork(0).master_seed(), r.fork(1).master_seed());
    }

    #[test]
    fn uniform_and_normal_moments() {
        let r = RngStream::new(7);
        let n = 200_000;
        let (mut su, mut sn, mut sn2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let mut s = r.stream(Tag::Estimator, i, 0);
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            su += u;
            let z = s.normal();
            sn += z;
            sn2 += z * z;
        }
        let n = n as f64;
        assert!((su / n - 0.5).abs() < 4.0 * (1.0 / 12.0f64 / n).sqrt());
        assert!((sn / n).abs() < 4.0 / n.sqrt());
        assert!((sn2 / n - 1.0).abs() < 4.0 * (2.0 / n).sqrt());
    }
}
