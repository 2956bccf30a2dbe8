//! Counter-based seed derivation.
//!
//! Every random stream in the pipeline is keyed by the tuple of indices that
//! identifies the work item it belongs to, so results do not depend on the
//! order in which threads pick up work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// The splitmix64 finalizer.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Folds `parts` into `root` one splitmix round per component.
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(root), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Stream labels so different consumers of the same indices never share a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Viewpoint = 1,
    Frame = 2,
    Noise = 3,
}

/// Seed for one (scene, viewpoint, level, frame) work item.
pub fn frame_seed(global: u64, scene_id: &str, viewpoint: u64, level: u64, frame: u64) -> u64 {
    derive_seed(
        global,
        &[
            Stream::Frame as u64,
            hash_str(scene_id),
            viewpoint,
            level,
            frame,
        ],
    )
}

pub fn viewpoint_seed(global: u64, scene_id: &str, viewpoint: u64) -> u64 {
    derive_seed(
        global,
        &[Stream::Viewpoint as u64, hash_str(scene_id), viewpoint],
    )
}

pub fn noise_seed(global: u64, gain_bits: u64, frame_index: u64) -> u64 {
    derive_seed(global, &[Stream::Noise as u64, gain_bits, frame_index])
}
