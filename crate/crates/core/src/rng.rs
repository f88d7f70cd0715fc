//! Portable seeded randomness.
//!
//! Every random object in the crate (sketches, generated problems, random
//! right-hand sides) is drawn from ChaCha8 seeded with `seed_from_u64`, whose
//! stream is specified independently of platform and word size. Normal
//! variates come from `rand_distr::StandardNormal`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type PortableRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> PortableRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal(rng: &mut PortableRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Standard normal vector for `seed`.
pub fn normal_vector(seed: u64, len: usize) -> Vec<f64> {
    standard_normal(&mut seeded(seed), len)
}
