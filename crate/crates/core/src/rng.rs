//! Counter-based random draws: the value for index `i` depends only on
//! `(seed, i)`, so serial and parallel runs agree bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream for sample `index`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform draw in `[0, 1)` for sample `index`.
pub fn unit_uniform(seed: u64, index: u64) -> f64 {
    stream(seed, index).gen::<f64>()
}

/// A uniform draw in `[lo, hi)` for sample `index`.
pub fn uniform_in(seed: u64, index: u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_uniform(seed, index)
}
