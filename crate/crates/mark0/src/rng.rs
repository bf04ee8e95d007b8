//! Deterministic, portable random number generation.
//!
//! Every stochastic element of the simulator draws from [`Xoshiro256PlusPlus`]
//! seeded through [`SplitMix64`]. Both generators are fixed public-domain
//! algorithms with stable bit-level output, so a run is reproducible from its
//! seed on any platform. Draw order is fixed by the step ordering: firms are
//! visited in index order and each conditional draw happens exactly where the
//! update rule needs it.

/// Source of uniform variates on `[0, 1)`.
///
/// The simulator is generic over this so tests can force exact values.
pub trait Uniform01 {
    fn next_f64(&mut self) -> f64;
}

/// SplitMix64: 64-bit mixer used for seeding and seed derivation.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }
}

/// SplitMix64 finalizer.
#[inline]
fn mix64(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from a base seed and up to three
/// coordinates (e.g. grid x index, y index, replicate index).
///
/// The scheme is `h <- mix64(h ^ (coord * PHI))` applied in order, starting
/// from `mix64(base)`. It is scheduling-independent: the seed of a sweep cell
/// depends only on `(base, x, y, replicate)`, never on worker count or
/// execution order.
pub fn derive_seed(base: u64, coords: &[u64]) -> u64 {
    const PHI: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut h = mix64(base);
    for &c in coords {
        h = mix64(h ^ c.wrapping_mul(PHI).wrapping_add(1));
    }
    h
}

/// xoshiro256++ by Blackman and Vigna. Period 2^256 - 1.
#[derive(Clone, Debug)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// Seeds the four state words from a SplitMix64 stream, as recommended
    /// by the algorithm's authors.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let mut s = [0u64; 4];
        for word in &mut s {
            *word = sm.next_u64();
        }
        if s == [0, 0, 0, 0] {
            s[0] = 1; // the all-zero state is the one invalid state
        }
        Self { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }
}

impl Uniform01 for Xoshiro256PlusPlus {
    /// Uniform on `[0, 1)` with 53 bits of precision.
    #[inline]
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
