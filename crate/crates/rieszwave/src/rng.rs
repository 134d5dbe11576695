//! Deterministic coordinate-keyed random streams.
//!
//! Every primitive Gaussian in the library is addressed by
//! `(master seed, stream tag, level, shift)` and drawn from a ChaCha8 stream
//! whose key is derived from that address by splitmix64 mixing. Draws
//! therefore never depend on evaluation order, window shapes, or thread
//! count: any schedule that touches the same coordinates sees the same
//! numbers, which is what makes output bytes reproducible under `--threads`
//! changes.

use crate::real::Real;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags separating independent families of draws under one master
/// seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    /// Coarsest-level scaling coefficients `a(j_min, ·)`.
    CascadeRoot = 1,
    /// Per-level detail coefficients `b(j, ·)`.
    CascadeDetail = 2,
    /// Per-path seed derivation for path ensembles.
    PathSeed = 3,
    /// Circulant-embedding Gaussians of the reference fractional Brownian
    /// sampler.
    ReferenceNoise = 4,
}

/// The splitmix64 mixing step: a bijective avalanche on `u64`.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha8 stream keyed by `(seed, tag, j, k-coordinates)`.
pub fn keyed_rng(seed: u64, tag: StreamTag, j: i32, k: &[i64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed ^ 0x5851_f42d_4c95_7f2d);
    state = splitmix64(state ^ (tag as u64));
    state = splitmix64(state ^ (j as u32 as u64));
    for &ki in k {
        state = splitmix64(state ^ (ki as u64));
    }
    // Length separation so (j, [k]) and (j, [k, 0]) differ.
    state = splitmix64(state ^ (k.len() as u64).wrapping_mul(0xa24b_aed4_963e_e407));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// One standard normal draw at the given coordinate address.
pub fn normal_at<T: Real>(seed: u64, tag: StreamTag, j: i32, k: &[i64]) -> T {
    let mut rng = keyed_rng(seed, tag, j, k);
    T::std_normal(&mut rng)
}

/// Derive the master seed of path `index` in an ensemble from the ensemble
/// seed (stable under reordering or partitioning of the ensemble).
pub fn path_seed(ensemble_seed: u64, index: u64) -> u64 {
    let mut state = splitmix64(ensemble_seed ^ (StreamTag::PathSeed as u64));
    state = splitmix64(state ^ index);
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn keyed_draws_are_reproducible() {
        let a: f64 = normal_at(42, StreamTag::CascadeDetail, 3, &[17]);
        let b: f64 = normal_at(42, StreamTag::CascadeDetail, 3, &[17]);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_addresses_decorrelate() {
        let base: f64 = normal_at(42, StreamTag::CascadeDetail, 3, &[17]);
        let variants: Vec<f64> = vec![
            normal_at(43, StreamTag::CascadeDetail, 3, &[17]),
            normal_at(42, StreamTag::CascadeRoot, 3, &[17]),
            normal_at(42, StreamTag::CascadeDetail, 4, &[17]),
            normal_at(42, StreamTag::CascadeDetail, 3, &[18]),
            normal_at(42, StreamTag::CascadeDetail, 3, &[17, 0]),
            normal_at(42, StreamTag::CascadeDetail, -3, &[17]),
        ];
        for v in variants {
            assert_ne!(v, base);
        }
    }

    #[test]
    fn negative_coordinates_are_distinct() {
        let a: f64 = normal_at(7, StreamTag::CascadeRoot, 0, &[-5]);
        let b: f64 = normal_at(7, StreamTag::CascadeRoot, 0, &[5]);
        assert_ne!(a, b);
    }

    #[test]
    fn moments_look_standard_normal() {
        // 40k keyed draws: mean within 5/√n, variance within 5·√(2/n).
        let n = 40_000;
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        for i in 0..n {
            let v: f64 = normal_at(1234, StreamTag::CascadeDetail, 0, &[i as i64]);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt(), "var {var}");
    }

    #[test]
    fn stream_is_a_full_rng() {
        // The keyed stream supports arbitrary consumption (ziggurat draws
        // use a variable number of words) without replaying.
        let mut rng = keyed_rng(9, StreamTag::ReferenceNoise, 0, &[0]);
        let u1: u64 = rng.gen();
        let u2: u64 = rng.gen();
        assert_ne!(u1, u2);
    }

    #[test]
    fn path_seed_stability() {
        assert_eq!(path_seed(100, 5), path_seed(100, 5));
        assert_ne!(path_seed(100, 5), path_seed(100, 6));
        assert_ne!(path_seed(100, 5), path_seed(101, 5));
    }

    #[test]
    fn splitmix_reference_values() {
        // Frozen reference outputs of the standard splitmix64 sequence
        // seeded at 0 (guards the constants against typos): output i is
        // `splitmix64(i·golden)` in this formulation.
        let g = 0x9e37_79b9_7f4a_7c15u64;
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(splitmix64(g), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(splitmix64(g.wrapping_mul(2)), 0x06c4_5d18_8009_454f);
    }
}
