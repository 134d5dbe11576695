//! Reference fractional Brownian motion sampler (circulant embedding).
//!
//! Used as the independent distributional oracle for the `d = 1` process:
//! the wavelet-synthesized process with one-dimensional kernels has exactly
//! the fractional Brownian covariance
//! `E[B_s B_t] = σ²/2 (s^{2H} + t^{2H} - |t-s|^{2H})`, so both samplers must
//! agree in law.
//!
//! The method embeds the stationary autocovariance of fractional Gaussian
//! noise on `n` points into a `2n`-circulant whose eigenvalues (one real
//! FFT) are provably nonnegative for fGn; coloring complex white noise by
//! `√λ` and transforming back yields increments with *exact* covariance —
//! no truncation or approximation beyond rounding.

use crate::error::{Error, Result};
use crate::fftutil::fft_in_place;
use crate::real::Real;
use crate::rng::{keyed_rng, StreamTag};
use num_complex::Complex;

/// Autocovariance of unit-spacing fractional Gaussian noise:
/// `r(k) = ½(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocov<T: Real>(hurst: T, lag: u64) -> T {
    let two_h = hurst + hurst;
    let k = T::from_f64_c(lag as f64);
    let half = T::from_f64_c(0.5);
    let p = |v: T| v.abs().powf(two_h);
    half * (p(k + T::one()) - (p(k) + p(k)) + p(k - T::one()))
}

/// Fractional Brownian covariance `½(s^{2H} + t^{2H} - |t-s|^{2H})` (unit
/// variance at `t = 1`).
pub fn fbm_cov<T: Real>(hurst: T, s: T, t: T) -> T {
    let two_h = hurst + hurst;
    let half = T::from_f64_c(0.5);
    half * (s.abs().powf(two_h) + t.abs().powf(two_h) - (t - s).abs().powf(two_h))
}

/// Exact-covariance fBm sampler on the uniform grid `t_i = i/n`, `i = 0..=n`.
#[derive(Debug, Clone)]
pub struct FbmSampler<T> {
    hurst: T,
    n: usize,
    /// `√(λ_k / (2M))` for `0 < k < M/2`, with the `k = 0` and `k = M/2`
    /// factors stored at their slots scaled for real draws.
    color: Vec<T>,
}

impl<T: Real + rustfft::FftNum> FbmSampler<T> {
    /// Prepare the embedding for `n ≥ 2` increments at Hurst index
    /// `H ∈ (0, 1)`; fails if the circulant spectrum dips below the rounding
    /// floor (it does not for fGn, so this guards implementation errors).
    pub fn new(hurst: T, n: usize) -> Result<Self> {
        if !(hurst > T::zero() && hurst < T::one()) {
            return Err(Error::invalid("Hurst index must lie in (0, 1)"));
        }
        if n < 2 {
            return Err(Error::invalid("need at least 2 increments"));
        }
        let m = 2 * n;
        let mut c = vec![Complex::new(T::zero(), T::zero()); m];
        for (j, slot) in c.iter_mut().enumerate() {
            let lag = if j <= n { j as u64 } else { (m - j) as u64 };
            *slot = Complex::new(fgn_autocov(hurst, lag), T::zero());
        }
        fft_in_place(&mut c, false);
        let m_t = T::from_usize_c(m);
        let floor = T::from_f64_c(-1e-9);
        let mut color = vec![T::zero(); m / 2 + 1];
        for (k, slot) in color.iter_mut().enumerate() {
            let lam = c[k].re;
            if lam < floor {
                return Err(Error::Domain(format!(
                    "circulant eigenvalue {k} is negative: {}",
                    lam.to_f64().unwrap_or(f64::NAN)
                )));
            }
            let lam = lam.max(T::zero());
            // Real bins (k = 0, M/2) carry a single real Gaussian of
            // variance λ/M; interior bins carry a complex pair of variance
            // λ/(2M) each.
            let denom = if k == 0 || k == m / 2 {
                m_t
            } else {
                m_t + m_t
            };
            *slot = (lam / denom).sqrt();
        }
        Ok(FbmSampler { hurst, n, color })
    }

    /// Hurst index.
    pub fn hurst(&self) -> T {
        self.hurst
    }

    /// Number of increments per path.
    pub fn n(&self) -> usize {
        self.n
    }

    /// One realization of `n` unit-spacing fGn samples.
    pub fn sample_increments(&self, seed: u64) -> Vec<T> {
        let m = 2 * self.n;
        let mut rng = keyed_rng(seed, StreamTag::ReferenceNoise, 0, &[]);
        let mut w = vec![Complex::new(T::zero(), T::zero()); m];
        w[0] = Complex::new(self.color[0] * T::std_normal(&mut rng), T::zero());
        for k in 1..m / 2 {
            let re = T::std_normal(&mut rng);
            let im = T::std_normal(&mut rng);
            let f = self.color[k];
            w[k] = Complex::new(f * re, f * im);
            w[m - k] = w[k].conj();
        }
        w[m / 2] = Complex::new(self.color[m / 2] * T::std_normal(&mut rng), T::zero());
        fft_in_place(&mut w, false);
        w.truncate(self.n);
        w.into_iter().map(|z| z.re).collect()
    }

    /// One fBm path on `t_i = i/n`, `i = 0..=n` (starts at zero, unit
    /// variance at `t = 1` in expectation).
    pub fn sample_path(&self, seed: u64) -> Vec<T> {
        let scale = T::from_usize_c(self.n).powf(-self.hurst);
        let mut path = Vec::with_capacity(self.n + 1);
        let mut acc = T::zero();
        path.push(acc);
        for g in self.sample_increments(seed) {
            acc += g;
            path.push(acc * scale);
        }
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_seed;

    #[test]
    fn autocov_brownian_case() {
        let r0: f64 = fgn_autocov(0.5, 0);
        assert!((r0 - 1.0).abs() < 1e-15);
        for k in 1..6 {
            let r: f64 = fgn_autocov(0.5, k);
            assert!(r.abs() < 1e-12, "lag {k}: {r}");
        }
    }

    #[test]
    fn embedding_valid_across_hurst_range() {
        for &h in &[0.55f64, 0.6, 0.7, 0.75, 0.9] {
            assert!(FbmSampler::new(h, 512).is_ok(), "H={h}");
        }
        assert!(FbmSampler::<f64>::new(1.2, 64).is_err());
        assert!(FbmSampler::<f64>::new(0.7, 1).is_err());
    }

    #[test]
    fn paths_are_deterministic_per_seed() {
        let s = FbmSampler::<f64>::new(0.7, 128).unwrap();
        let p1 = s.sample_path(11);
        let p2 = s.sample_path(11);
        let p3 = s.sample_path(12);
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
        assert_eq!(p1.len(), 129);
        assert_eq!(p1[0], 0.0);
    }

    #[test]
    fn increment_moments() {
        // Pooled over paths: mean ≈ 0, variance ≈ 1 for the fGn samples.
        let s = FbmSampler::<f64>::new(0.75, 256).unwrap();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let reps = 40;
        for r in 0..reps {
            for g in s.sample_increments(path_seed(500, r)) {
                sum += g;
                sumsq += g * g;
            }
        }
        let n = (reps as usize * 256) as f64;
        let mean = sum / n;
        // fGn is positively correlated at H > 1/2: the pooled mean has
        // variance ≈ (reps · n_per²ᴴ)/n² per path-sum self-similarity.
        let mean_sd = (reps as f64 * 256f64.powf(1.5)).sqrt() / n;
        assert!(mean.abs() < 5.0 * mean_sd, "mean {mean}");
        let var = sumsq / n - mean * mean;
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn path_covariance_matches_exact_form() {
        let h = 0.7f64;
        let n = 128usize;
        let s = FbmSampler::new(h, n).unwrap();
        let reps: u64 = 1500;
        let pairs = [(32usize, 32usize), (32, 96), (64, 128), (128, 128)];
        let mut acc = [0.0f64; 4];
        for r in 0..reps {
            let p = s.sample_path(path_seed(7, r));
            for (slot, &(i, jj)) in acc.iter_mut().zip(pairs.iter()) {
                *slot += p[i] * p[jj];
            }
        }
        for (&(i, jj), &sum) in pairs.iter().zip(acc.iter()) {
            let est = sum / reps as f64;
            let s_t = (i as f64 / n as f64, jj as f64 / n as f64);
            let want = fbm_cov(h, s_t.0, s_t.1);
            // Var(B_s B_t) = Cov² + Var_s Var_t for Gaussians.
            let sd = ((want * want
                + fbm_cov(h, s_t.0, s_t.0) * fbm_cov(h, s_t.1, s_t.1))
                / reps as f64)
                .sqrt();
            assert!(
                (est - want).abs() < 5.0 * sd,
                "cov({:.2},{:.2}): est {est:.4}, want {want:.4}, sd {sd:.4}",
                s_t.0,
                s_t.1
            );
        }
    }
}
