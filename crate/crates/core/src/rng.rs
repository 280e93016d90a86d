//! Addressable random streams.
//!
//! Every random draw in the crate is addressed by a [`StreamKey`] built from
//! the experiment seed, a purpose tag and any number of integer indices
//! (round, hop, ring, ...). The key is hashed into the seed of a small,
//! fast generator, so the value of a draw depends only on its address and
//! never on which thread ran it or in what order rounds were visited.

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator handed out by [`StreamKey::rng`].
pub type StreamRng = Xoshiro256PlusPlus;

/// What a stream is used for. Distinct tags keep unrelated draws apart even
/// when the remaining indices coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    LegitNodes = 1,
    Jammers = 2,
    Eavesdroppers = 3,
    ConnectionSim = 4,
    SecrecySim = 5,
    Fading = 6,
    Verifier = 7,
    Experiment = 8,
    User = 9,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

// splitmix64 finalizer
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(mix(seed ^ 0x5851_f42d_4c95_7f2d))
    }

    pub fn purpose(self, purpose: Purpose) -> Self {
        self.index(purpose as u64 ^ 0xa076_1d64_78bd_642f)
    }

    /// Derives a child address. `k.index(a).index(b)` and `k.index(b).index(a)`
    /// are different streams.
    #[inline]
    pub fn index(self, i: u64) -> Self {
        StreamKey(mix(self.0.rotate_left(23) ^ mix(i)))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// Generator seeded with four consecutive splitmix64 outputs of the key.
    #[inline]
    pub fn rng(self) -> StreamRng {
        let mut seed = [0u8; 32];
        for (i, chunk) in seed.chunks_exact_mut(8).enumerate() {
            let word = mix(self
                .0
                .wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        StreamRng::from_seed(seed)
    }
}
