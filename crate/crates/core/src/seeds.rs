//! Counter-based seed derivation.
//!
//! Every random quantity in a run hangs off one master seed:
//! master -> grid point -> trial -> voter substream. Child seeds are a pure
//! function of the parent seed and a label, so results never depend on the
//! order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` under `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    mix(mix(parent.wrapping_add(GOLDEN)) ^ index.wrapping_mul(GOLDEN).rotate_left(17))
}

/// Folds a sequence of labels into a child seed. Labels are usually f64 bit
/// patterns of the parameters identifying a grid point.
pub fn derive_path(parent: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(parent, |seed, &l| derive(seed, l))
}

/// Independent ChaCha8 streams keyed by one seed; stream `i` belongs to voter `i`.
#[derive(Clone, Debug)]
pub struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Substreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}
