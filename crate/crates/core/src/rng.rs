//! Named random substreams.
//!
//! Every random choice in the pipeline (fold assignment, tie breaking,
//! negative sampling, neighbor ordering) draws from its own stream derived
//! from the run seed plus a label and a key, so each component is
//! reproducible on its own regardless of call order elsewhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the stream `(seed, label, key)`.
pub fn substream_seed(seed: u64, label: &str, key: &str) -> u64 {
    let mut h = fnv1a(label.as_bytes(), 0xcbf2_9ce4_8422_2325);
    h = fnv1a(&[0xff], h);
    h = fnv1a(key.as_bytes(), h);
    splitmix64(seed ^ splitmix64(h))
}

pub fn substream(seed: u64, label: &str, key: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, label, key))
}

/// Orders `0..scores.len()` by descending score. Equal scores are permuted
/// by random keys drawn from `rng`, one per position in index order.
pub fn order_by_score<R: Rng>(scores: &[f64], rng: &mut R) -> Vec<usize> {
    let keys: Vec<u64> = (0..scores.len()).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    order
}
