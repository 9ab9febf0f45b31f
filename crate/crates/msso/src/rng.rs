//! Deterministic seed derivation for experiments.
//!
//! Every randomized run hangs off a single root seed. Component `stream`,
//! element `index` (a trial number, a λ index, ...) keys its own ChaCha8
//! generator through a splitmix64 hash chain, so workers may process trials
//! in any order and still reproduce the same draws bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 step: advances the state and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash chain root → stream → index. Distinct coordinates give independent
/// seeds; identical coordinates always give the same one.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let mut s = root ^ 0xA076_1D64_78BD_642F;
    s = splitmix64(&mut s) ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    s = splitmix64(&mut s) ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    splitmix64(&mut s)
}

/// The generator for one (root, stream, index) coordinate.
pub fn rng_for(root: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}

/// Stream tags used by the experiment harness.
pub mod streams {
    /// Problem generation for one trial.
    pub const TRIAL: u64 = 0;
    /// Additive measurement noise for one trial.
    pub const NOISE: u64 = 1;
    /// Scene synthesis (profiles, phases).
    pub const SCENE: u64 = 2;
}
