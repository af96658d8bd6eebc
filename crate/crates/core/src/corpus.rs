//! Seeded random instance generation shared by the acceptance suite, the CLI
//! self-test and the benchmarks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactlin::{rank, FieldTag, VectorF};
use crate::systems::{Configuration, System};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random spanning configuration: n vectors over the field with small
/// entries, resampled until they span 𝔽^k.
pub fn random_configuration(
    rng: &mut ChaCha8Rng,
    field: &FieldTag,
    n: usize,
    k: usize,
    m: usize,
) -> Configuration {
    loop {
        let vectors: Vec<VectorF> = (0..n)
            .map(|_| (0..k).map(|_| field.from_i64(rng.gen_range(-2..=2))).collect())
            .collect();
        if rank(&vectors).unwrap() != k {
            continue;
        }
        if let Ok(config) = Configuration::new(field.clone(), k, m, vectors) {
            return config;
        }
    }
}

/// A random system of the given total size over 1..=n.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, size: usize) -> System {
    let mut system = System::empty();
    for _ in 0..size {
        system.add(rng.gen_range(1..=n as u32), 1);
    }
    system
}

/// One of the three acceptance fields, chosen by a die roll.
pub fn random_field(rng: &mut ChaCha8Rng) -> FieldTag {
    match rng.gen_range(0..3) {
        0 => FieldTag::Rationals,
        1 => FieldTag::new_prime(2).unwrap(),
        _ => FieldTag::new_prime(3).unwrap(),
    }
}
