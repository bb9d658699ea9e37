//! Seeded, splittable random streams.
//!
//! Every experiment owns a root seed. Independent pieces of work (a sweep
//! cell, a retry inside a build, the quadrature points) draw from their own
//! ChaCha stream, selected by mixing a list of integer tags into the stream
//! id. The same `(seed, tags)` always yields the same stream regardless of
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Environment variable that supplies the default root seed.
pub const SEED_ENV: &str = "BARRONFORGE_SEED";

pub const DEFAULT_SEED: u64 = 20_250_601;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Root stream for `seed`.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sub-stream of `seed` identified by `tags`.
pub fn substream(seed: u64, tags: &[u64]) -> Stream {
    let id = tags
        .iter()
        .fold(0x5851_F42D_4C95_7F2D_u64, |acc, &t| splitmix(acc ^ splitmix(t)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Seed from `BARRONFORGE_SEED`, falling back to [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
