//! Seed derivation for independent per-episode random streams.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a base seed with a stream label into a new, well-mixed seed.
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix(mix(seed) ^ stream.rotate_left(32))
}

/// Stream label for dynamics actuation noise.
pub const DYNAMICS_STREAM: u64 = 1;
/// Stream label for detector corruption.
pub const PERCEPTION_STREAM: u64 = 2;
