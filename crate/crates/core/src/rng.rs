//! Seeded, splittable random streams.
//!
//! Every unit of parallel work (a pool slot, a particle, a replicate run) gets
//! its own ChaCha8 stream keyed by `(master seed, domain, stage)` with the work
//! index as the ChaCha stream id. Results therefore depend only on the master
//! seed and the index, never on how rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Named sub-spaces of the master seed so unrelated consumers never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Simulate = 1,
    Observed = 2,
    Smc = 3,
    Replicate = 4,
    Test = 5,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Root of a family of independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Stream for work item `index` of `stage` inside `domain`.
    pub fn stream(&self, domain: Domain, stage: u64, index: u64) -> Stream {
        let mut key = [0u8; 32];
        let mut h = splitmix64(self.master ^ splitmix64(domain as u64));
        h = splitmix64(h ^ splitmix64(stage.wrapping_add(0x5851_F42D_4C95_7F2D)));
        for chunk in key.chunks_exact_mut(8) {
            h = splitmix64(h);
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }

    /// Derived tree, e.g. one per sweep cell or replicate.
    pub fn child(&self, domain: Domain, index: u64) -> SeedTree {
        SeedTree::new(splitmix64(
            self.master ^ splitmix64((domain as u64) << 32 ^ splitmix64(index)),
        ))
    }
}
