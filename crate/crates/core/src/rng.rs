//! Seeded random source shared by the corpus synthesizer and the null model.
//!
//! The stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Both are value-stable across platforms. Bounded
//! integers use Lemire's multiply-and-reject on 64-bit draws, so results never
//! depend on the width of `usize`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a run with master seed `master`:
/// `splitmix64(master ^ splitmix64(index))`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Uniform integer in `0..n`. `n` must be non-zero.
pub fn uniform_below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0, "uniform_below called with n = 0");
    let mut m = u128::from(rng.next_u64()) * u128::from(n);
    let mut low = m as u64;
    if low < n {
        let threshold = n.wrapping_neg() % n;
        while low < threshold {
            m = u128::from(rng.next_u64()) * u128::from(n);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// Uniform `f64` in `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Picks `k` distinct bins out of `0..n_bins` by a partial Fisher–Yates pass
/// over a freshly reset index array. The chosen bins are returned sorted.
pub fn choose_distinct<R: RngCore>(
    rng: &mut R,
    n_bins: usize,
    k: usize,
    scratch: &mut Vec<usize>,
) -> Vec<usize> {
    assert!(k <= n_bins, "cannot choose {k} of {n_bins} bins");
    scratch.clear();
    scratch.extend(0..n_bins);
    for i in 0..k {
        let j = i + uniform_below(rng, (n_bins - i) as u64) as usize;
        scratch.swap(i, j);
    }
    let mut chosen = scratch[..k].to_vec();
    chosen.sort_unstable();
    chosen
}
