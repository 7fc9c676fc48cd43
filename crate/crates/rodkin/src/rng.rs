//! Counter-based random numbers.
//!
//! Every draw is a pure hash of (seed, stream, step, draw): there is no
//! mutable generator state, so parallel consumers get bitwise identical
//! numbers in any execution order and with any thread count. The mixer is
//! the splitmix64 finalizer applied per key word, which is amply uniform
//! for simulation noise (it is the standard seeding generator).

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed and a three-word counter into one well-scrambled word.
pub fn mix(seed: u64, stream: u64, step: u64, draw: u64) -> u64 {
    let mut z = finalize(seed.wrapping_add(GOLDEN));
    for word in [stream, step, draw] {
        z = finalize(z.wrapping_add(word).wrapping_add(GOLDEN));
    }
    z
}

/// Uniform draw in [0, 1) with 53 random bits.
pub fn uniform01(seed: u64, stream: u64, step: u64, draw: u64) -> f64 {
    (mix(seed, stream, step, draw) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [-half_width, half_width).
pub fn uniform_symmetric(seed: u64, stream: u64, step: u64, draw: u64, half_width: f64) -> f64 {
    (2.0 * uniform01(seed, stream, step, draw) - 1.0) * half_width
}
