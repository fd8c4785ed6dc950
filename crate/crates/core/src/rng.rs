//! Seeded random streams for experiment runs.
//!
//! Every run gets its own seed derived from the master seed. Inside a run,
//! each arm samples from its own ChaCha stream and action selection uses a
//! separate one, so draws for one arm never depend on how often the others
//! were pulled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run` under `master_seed`.
pub fn run_seed(master_seed: u64, run: u64) -> u64 {
    mix64(master_seed ^ mix64(run.wrapping_add(1)))
}

#[derive(Debug, Clone)]
pub struct RunStreams {
    arms: Vec<ChaCha8Rng>,
    selection: ChaCha8Rng,
}

impl RunStreams {
    pub fn new(seed: u64, arm_count: usize) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let stream = |k: u64| {
            let mut r = base.clone();
            r.set_stream(k);
            r
        };
        RunStreams {
            arms: (0..arm_count as u64).map(|a| stream(a + 1)).collect(),
            selection: stream(0),
        }
    }

    pub fn arm(&mut self, arm: usize) -> &mut ChaCha8Rng {
        &mut self.arms[arm]
    }

    pub fn selection(&mut self) -> &mut ChaCha8Rng {
        &mut self.selection
    }
}
