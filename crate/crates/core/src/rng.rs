//! Counter-based random streams.
//!
//! Every draw in the simulator comes from a stream addressed by
//! `(master seed, run index, time index, tag)`. The stream is a ChaCha8
//! generator keyed by the master seed, with the run index as the ChaCha
//! stream id and the `(time, tag)` pair fixing the starting block. Two
//! simulations that share a seed therefore see identical process noise no
//! matter which policy or gain they use, and runs can be evaluated in any
//! order or on any number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which consumer a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamTag {
    /// Draw of `W_{-1}`, i.e. the initial-state deviation.
    InitialState = 0,
    /// Draw of `W_t` at time `t`.
    ProcessNoise = 1,
    /// Future-noise samples used by the rollout selector at time `t`.
    Rollout = 2,
}

const TAG_COUNT: u128 = 3;
/// 32-bit words reserved per `(time, tag)` slot.
const SLOT_WORDS: u128 = 1 << 40;
/// Words reserved per indexed substream inside a slot.
const SUBSTREAM_WORDS: u128 = 1 << 24;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Expands a 64-bit master seed into a ChaCha key.
pub fn expand_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Derives an independent 64-bit seed from a parent seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut state = seed ^ label.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    splitmix64(&mut state)
}

/// Stream addressed by `(seed, run, time, tag)`.
pub fn stream(seed: u64, run: u64, time: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
    rng.set_stream(run);
    let slot = time as u128 * TAG_COUNT + tag as u128;
    rng.set_word_pos(slot * SLOT_WORDS);
    rng
}

/// Substream `index` of the `(seed, run, time, tag)` slot, for consumers that
/// draw several independent sample paths at one time step.
pub fn substream(seed: u64, run: u64, time: u64, tag: StreamTag, index: u64) -> ChaCha8Rng {
    assert!(
        (index as u128) < SLOT_WORDS / SUBSTREAM_WORDS,
        "substream index out of range"
    );
    let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
    rng.set_stream(run);
    let slot = time as u128 * TAG_COUNT + tag as u128;
    rng.set_word_pos(slot * SLOT_WORDS + index as u128 * SUBSTREAM_WORDS);
    rng
}
