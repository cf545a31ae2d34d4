#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use k3lattice::intlat::{Isometry, Lattice};
use k3lattice::monodromy;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x6b33), failure_persistence: None, ..Config::default() }
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Reflection in a random sparse vector of square ±2.
pub fn random_reflection(lattice: &Arc<Lattice>, rng: &mut ChaCha8Rng) -> Isometry {
    let sq = if rng.gen_bool(0.5) { 2 } else { -2 };
    let u = monodromy::sample_vector_of_square(lattice, sq, rng);
    monodromy::reflection(&u).unwrap()
}

pub fn random_product(lattice: &Arc<Lattice>, rng: &mut ChaCha8Rng, len: usize) -> Isometry {
    (0..len).fold(Isometry::identity(Arc::clone(lattice)), |acc, _| {
        acc.compose(&random_reflection(lattice, rng)).unwrap()
    })
}
