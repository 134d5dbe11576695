//! Lemarié–Meyer scaling function and wavelet, tensor basis indexing, and the
//! two-scale filter pair.
//!
//! The construction is entirely spectral. With the `C³` auxiliary ramp
//! `ν(x) = x⁴(35 - 84x + 70x² - 20x³)` on `[0,1]` (0 below, 1 above), the
//! scaling spectrum and the wavelet modulus are
//!
//! ```text
//! φ̂(ξ) = 1                         |ξ| ≤ 2π/3
//!       = cos(π/2 · ν(3|ξ|/2π - 1)) 2π/3 ≤ |ξ| ≤ 4π/3
//!       = 0                         otherwise,
//!
//! w(ξ)  = sin(π/2 · ν(3ξ/2π - 1))  2π/3 ≤ ξ ≤ 4π/3
//!       = cos(π/2 · ν(3ξ/4π - 1))  4π/3 ≤ ξ ≤ 8π/3
//!       = 0                         otherwise,
//! ```
//!
//! and `ψ̂(ξ) = e^{iξ/2} w(|ξ|)`. Then `{ψ_{j,k}}` is an orthonormal basis of
//! `L²(R)` whose members have all moments vanishing (the spectrum is flat zero
//! near the origin), and `ψ` is real, even about `x = -1/2`. Tensor products
//! `ψ^(eps)(x) = Π_i ψ^(eps_i)(x_i)` (with `ψ^(0) = φ`, `ψ^(1) = ψ`) over
//! `eps ∈ E = {0,1}^d \ {0}` at dyadic shifts form the basis of `L²(R^d)`
//! driving both the expansion coefficients and the chaos sampler.

use crate::error::{Error, Result};
use crate::quad::integrate_osc;
use crate::real::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::path::Path;

/// Lower edge of the wavelet spectral support.
pub const PSI_SUPPORT_LO: f64 = 2.0 * std::f64::consts::PI / 3.0;
/// Upper edge of the wavelet spectral support.
pub const PSI_SUPPORT_HI: f64 = 8.0 * std::f64::consts::PI / 3.0;
/// Upper edge of the scaling spectral support.
pub const PHI_SUPPORT_HI: f64 = 4.0 * std::f64::consts::PI / 3.0;

/// Version tag written into caches that depend on the basis construction.
pub const BASIS_VERSION: &str = "meyer-quartic-c3-v1";

/// The `C³` auxiliary ramp `ν`: 0 for `x ≤ 0`, 1 for `x ≥ 1`,
/// `x⁴(35 - 84x + 70x² - 20x³)` between.
pub fn nu<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x >= T::one() {
        T::one()
    } else {
        let c35 = T::from_f64_c(35.0);
        let c84 = T::from_f64_c(84.0);
        let c70 = T::from_f64_c(70.0);
        let c20 = T::from_f64_c(20.0);
        x * x * x * x * (c35 - x * (c84 - x * (c70 - x * c20)))
    }
}

/// Scaling spectrum `φ̂(ξ)` (real, even, supported in `|ξ| ≤ 4π/3`).
pub fn phi_hat<T: Real>(xi: T) -> T {
    let a = xi.abs();
    let lo = T::from_f64_c(PSI_SUPPORT_LO);
    let hi = T::from_f64_c(PHI_SUPPORT_HI);
    if a <= lo {
        T::one()
    } else if a < hi {
        let half_pi = T::FRAC_PI_2();
        let arg = T::from_f64_c(1.5) * a / T::PI() - T::one();
        (half_pi * nu(arg)).cos()
    } else {
        T::zero()
    }
}

/// Wavelet spectral modulus `w(|ξ|) = |ψ̂(ξ)|` (supported in
/// `2π/3 ≤ |ξ| ≤ 8π/3`).
pub fn psi_hat_modulus<T: Real>(xi: T) -> T {
    let a = xi.abs();
    let lo = T::from_f64_c(PSI_SUPPORT_LO);
    let mid = T::from_f64_c(PHI_SUPPORT_HI);
    let hi = T::from_f64_c(PSI_SUPPORT_HI);
    let half_pi = T::FRAC_PI_2();
    if a >= lo && a <= mid {
        let arg = T::from_f64_c(1.5) * a / T::PI() - T::one();
        (half_pi * nu(arg)).sin()
    } else if a > mid && a <= hi {
        let arg = T::from_f64_c(0.75) * a / T::PI() - T::one();
        (half_pi * nu(arg)).cos()
    } else {
        T::zero()
    }
}

/// The Meyer pair in the Fourier domain: `(φ̂(ξ), ψ̂(ξ))` with
/// `ψ̂(ξ) = e^{iξ/2} w(|ξ|)`.
pub fn meyer_hat<T: Real>(xi: T) -> (T, Complex<T>) {
    let modulus = psi_hat_modulus(xi);
    let half = T::from_f64_c(0.5);
    let phase = xi * half;
    let psi = Complex::new(modulus * phase.cos(), modulus * phase.sin());
    (phi_hat(xi), psi)
}

/// Spectrum of the tensor element `ψ^(eps)` at `ξ ∈ R^d`: the product of
/// `φ̂(ξ_i)` where `eps_i = 0` and `ψ̂(ξ_i)` where `eps_i = 1`.
///
/// Vanishes unless every `ψ` factor sees `|ξ_i| ∈ [2π/3, 8π/3]`, so the
/// support always satisfies `‖ξ‖₂ ≥ 2π/3`.
pub fn tensor_hat<T: Real>(eps: &[u8], xi: &[T]) -> Result<Complex<T>> {
    validate_eps(eps)?;
    if xi.len() != eps.len() {
        return Err(Error::invalid(format!(
            "point dimension {} does not match eps dimension {}",
            xi.len(),
            eps.len()
        )));
    }
    let mut acc = Complex::new(T::one(), T::zero());
    for (&e, &x) in eps.iter().zip(xi.iter()) {
        let (p, psi) = meyer_hat(x);
        if e == 0 {
            acc = acc * Complex::new(p, T::zero());
        } else {
            acc = acc * psi;
        }
    }
    Ok(acc)
}

fn validate_eps(eps: &[u8]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::invalid("eps must have dimension >= 1"));
    }
    if eps.iter().any(|&e| e > 1) {
        return Err(Error::invalid("eps entries must be 0 or 1"));
    }
    if eps.iter().all(|&e| e == 0) {
        return Err(Error::invalid(
            "eps = (0,…,0) is excluded: at least one wavelet factor is required",
        ));
    }
    Ok(())
}

/// Time-domain scaling function `φ(x)` by cosine quadrature over the compact
/// spectrum: `φ(x) = (1/π) ∫_0^{4π/3} φ̂(ξ) cos(ξx) dξ`.
pub fn eval_phi<T: Real>(x: T) -> T {
    let omega = x.to_f64().unwrap_or(0.0).abs();
    let lo = T::from_f64_c(PSI_SUPPORT_LO);
    let hi = T::from_f64_c(PHI_SUPPORT_HI);
    let f = |xi: T| phi_hat(xi) * (xi * x).cos();
    (integrate_osc(f, T::zero(), lo, omega) + integrate_osc(f, lo, hi, omega)) / T::PI()
}

/// Time-domain wavelet `ψ(x)`; real and even about `x = -1/2`:
/// `ψ(x) = (1/π) ∫_{2π/3}^{8π/3} w(ξ) cos(ξ(x + 1/2)) dξ`.
pub fn eval_psi<T: Real>(x: T) -> T {
    let half = T::from_f64_c(0.5);
    let c = x + half;
    let omega = c.to_f64().unwrap_or(0.0).abs();
    let lo = T::from_f64_c(PSI_SUPPORT_LO);
    let mid = T::from_f64_c(PHI_SUPPORT_HI);
    let hi = T::from_f64_c(PSI_SUPPORT_HI);
    let f = |xi: T| psi_hat_modulus(xi) * (xi * c).cos();
    (integrate_osc(&f, lo, mid, omega) + integrate_osc(&f, mid, hi, omega)) / T::PI()
}

/// Index of one tensor basis element `ψ^(eps)_{j,k}`, i.e. the function
/// `2^{jd/2} ψ^(eps)(2^j x - k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveletIndex {
    /// Dyadic level.
    pub j: i32,
    /// Integer shift vector in `Z^d`.
    pub k: Vec<i64>,
    /// Component selector in `E = {0,1}^d \ {0}`: 0 picks `φ`, 1 picks `ψ`.
    pub eps: Vec<u8>,
}

impl WaveletIndex {
    /// Validated constructor: `k` and `eps` must share the dimension, and
    /// `eps` must contain at least one 1.
    pub fn new(j: i32, k: Vec<i64>, eps: Vec<u8>) -> Result<Self> {
        validate_eps(&eps)?;
        if k.len() != eps.len() {
            return Err(Error::invalid(format!(
                "shift dimension {} does not match eps dimension {}",
                k.len(),
                eps.len()
            )));
        }
        Ok(WaveletIndex { j, k, eps })
    }

    /// Dimension `d`.
    pub fn d(&self) -> usize {
        self.eps.len()
    }

    /// Rank of `eps` in binary counting order, reading `eps[i]` as bit `i`;
    /// ranges over `1 ..= 2^d - 1` and fixes the deterministic enumeration
    /// used for reproducible substream assignment.
    pub fn eps_rank(&self) -> usize {
        self.eps
            .iter()
            .enumerate()
            .map(|(i, &e)| (e as usize) << i)
            .sum()
    }

    /// `‖k‖₁`.
    pub fn k_l1(&self) -> i64 {
        self.k.iter().map(|&v| v.abs()).sum()
    }
}

/// Deterministic total order: lexicographic on
/// `(|j|, j, d, ‖k‖₁, k, eps)` — coarse-to-fine by absolute level, with the
/// remaining fields breaking ties reproducibly.
impl Ord for WaveletIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j.abs(), self.j, self.d(), self.k_l1())
            .cmp(&(other.j.abs(), other.j, other.d(), other.k_l1()))
            .then_with(|| self.k.cmp(&other.k))
            .then_with(|| self.eps.cmp(&other.eps))
    }
}

impl PartialOrd for WaveletIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `eps ∈ E = {0,1}^d \ {0}` in binary counting order (rank
/// `1, 2, …, 2^d - 1` with `eps[i]` as bit `i`).
pub fn enumerate_eps(d: usize) -> Vec<Vec<u8>> {
    assert!(d >= 1 && d < 32, "dimension out of range");
    (1usize..(1 << d))
        .map(|m| (0..d).map(|i| ((m >> i) & 1) as u8).collect())
        .collect()
}

/// A basis function to evaluate: either a full tensor element or one of the
/// two 1-d atoms it is built from.
#[derive(Debug, Clone, Copy)]
pub enum BasisFn<'a> {
    /// Tensor element `ψ^(eps)_{j,k}` on `R^d`.
    Tensor(&'a WaveletIndex),
    /// 1-d scaling atom `φ_{j,k}(x) = 2^{j/2} φ(2^j x - k)`.
    Scaling { j: i32, k: i64 },
    /// 1-d wavelet atom `ψ_{j,k}(x) = 2^{j/2} ψ(2^j x - k)`.
    Wavelet { j: i32, k: i64 },
}

/// Evaluate a basis function at `x` by spectral quadrature.
///
/// Used by tests and oracles (the synthesis hot path goes through the
/// potential tables instead); spectrally accurate since every integrand is
/// band-limited.
pub fn eval_wavelet<T: Real>(f: &BasisFn<'_>, x: &[T]) -> Result<T> {
    match *f {
        BasisFn::Scaling { j, k } => {
            let [x0] = x else {
                return Err(Error::invalid("1-d atom evaluated at non-1-d point"));
            };
            Ok(dilate_1d(j, k, *x0, eval_phi))
        }
        BasisFn::Wavelet { j, k } => {
            let [x0] = x else {
                return Err(Error::invalid("1-d atom evaluated at non-1-d point"));
            };
            Ok(dilate_1d(j, k, *x0, eval_psi))
        }
        BasisFn::Tensor(idx) => {
            if x.len() != idx.d() {
                return Err(Error::invalid(format!(
                    "point dimension {} does not match index dimension {}",
                    x.len(),
                    idx.d()
                )));
            }
            let mut acc = T::one();
            for i in 0..idx.d() {
                let f1 = if idx.eps[i] == 0 { eval_phi } else { eval_psi };
                acc = acc * dilate_1d(idx.j, idx.k[i], x[i], f1);
            }
            Ok(acc)
        }
    }
}

#[inline]
fn dilate_1d<T: Real, F: Fn(T) -> T>(j: i32, k: i64, x: T, f: F) -> T {
    let scale = T::exp2_i(j);
    let root = T::exp2_i(j).sqrt();
    root * f(scale * x - T::from_i64_c(k))
}

/// Which 1-d atom a factor refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    Scaling,
    Wavelet,
}

/// `L²(R)` inner product `⟨f_{j,k}, g_{j',k'}⟩` of two (possibly
/// different-level) Meyer atoms, by cosine quadrature over the intersection
/// of their compact spectral supports.
///
/// Exact zeros (disjoint supports — e.g. wavelets two or more levels apart)
/// are returned without quadrature.
pub fn atom_inner<T: Real>(
    kind_a: AtomKind,
    j_a: i32,
    k_a: i64,
    kind_b: AtomKind,
    j_b: i32,
    k_b: i64,
) -> T {
    let support = |kind: AtomKind, j: i32| -> (f64, f64) {
        let s = (j as f64).exp2();
        match kind {
            AtomKind::Scaling => (0.0, PHI_SUPPORT_HI * s),
            AtomKind::Wavelet => (PSI_SUPPORT_LO * s, PSI_SUPPORT_HI * s),
        }
    };
    let (lo_a, hi_a) = support(kind_a, j_a);
    let (lo_b, hi_b) = support(kind_b, j_b);
    let lo = lo_a.max(lo_b);
    let hi = hi_a.min(hi_b);
    if lo >= hi {
        return T::zero();
    }
    // Each atom spectrum is 2^{-j/2} env(2^{-j}ξ) e^{iθ ξ} with
    // θ = 2^{-j}(is_wavelet/2 - k); the conjugated product integrates to a
    // pure cosine integral by Hermitian symmetry.
    let theta = |kind: AtomKind, j: i32, k: i64| -> f64 {
        let half = match kind {
            AtomKind::Scaling => 0.0,
            AtomKind::Wavelet => 0.5,
        };
        (half - k as f64) * (-j as f64).exp2()
    };
    let omega = theta(kind_a, j_a, k_a) - theta(kind_b, j_b, k_b);
    let env = |kind: AtomKind, j: i32, xi: T| -> T {
        let arg = xi * T::exp2_i(-j);
        match kind {
            AtomKind::Scaling => phi_hat(arg),
            AtomKind::Wavelet => psi_hat_modulus(arg),
        }
    };
    let amp = T::exp2_i(-(j_a + j_b)).sqrt();
    let omega_t = T::from_f64_c(omega);
    let f = |xi: T| env(kind_a, j_a, xi) * env(kind_b, j_b, xi) * (omega_t * xi).cos();
    // Break at every envelope transition inside [lo, hi].
    let mut brk = vec![lo, hi];
    for j in [j_a, j_b] {
        let s = (j as f64).exp2();
        for edge in [PSI_SUPPORT_LO * s, PHI_SUPPORT_HI * s, PSI_SUPPORT_HI * s] {
            if edge > lo && edge < hi {
                brk.push(edge);
            }
        }
    }
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup();
    let mut acc = T::zero();
    for wpair in brk.windows(2) {
        acc += integrate_osc(
            &f,
            T::from_f64_c(wpair[0]),
            T::from_f64_c(wpair[1]),
            omega.abs(),
        );
    }
    amp * acc / T::PI()
}

/// One truncated discrete filter: taps for `n ∈ [n_min, n_min + len)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter<T> {
    pub n_min: i64,
    pub taps: Vec<T>,
}

impl<T: Real> Filter<T> {
    /// Tap at index `n` (zero outside the stored range).
    #[inline]
    pub fn at(&self, n: i64) -> T {
        let off = n - self.n_min;
        if off < 0 || off as usize >= self.taps.len() {
            T::zero()
        } else {
            self.taps[off as usize]
        }
    }

    /// Stored index range.
    pub fn range(&self) -> std::ops::RangeInclusive<i64> {
        self.n_min..=self.n_min + self.taps.len() as i64 - 1
    }
}

/// The two-scale filter pair of the Meyer multiresolution:
///
/// ```text
/// φ_{j,k} = Σ_n h_{n-2k} φ_{j+1,n},    ψ_{j,k} = Σ_n g_{n-2k} φ_{j+1,n},
/// ```
///
/// with `h_n = ⟨φ_{0,0}, φ_{1,n}⟩` (even about 0) and
/// `g_n = ⟨ψ_{0,0}, φ_{1,n}⟩` (even about -1). Meyer filters decay
/// polynomially (`~|n|^{-5}` for the `C³` ramp), so the taps are truncated at
/// the half-length `L` that brings the discarded energy below a tolerance;
/// the exact discarded energy (via `Σ_n h_n² = Σ_n g_n² = 1`) is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterPair<T> {
    /// Low-pass taps on `[-L, L]`.
    pub h: Filter<T>,
    /// High-pass taps on `[-1-L, -1+L]`.
    pub g: Filter<T>,
    /// Truncation half-length `L`.
    pub half_len: i64,
    /// Energy `max(Σ_{|n|>L} h_n², Σ_{|n+1|>L} g_n²)` discarded by the
    /// truncation.
    pub tail_energy: T,
    /// Basis construction tag for cache validation.
    pub basis_version: String,
}

/// Largest admissible truncation half-length.
pub const FILTER_MAX_HALF_LEN: i64 = 4096;

/// Low-pass tap `h_n = (√2/π) ∫_0^{2π/3} φ̂(2u) cos(nu) du`.
fn h_tap<T: Real>(n: i64) -> T {
    let third_pi = T::from_f64_c(std::f64::consts::PI / 3.0);
    let two_third_pi = T::from_f64_c(PSI_SUPPORT_LO);
    let n_t = T::from_i64_c(n);
    let f = |u: T| phi_hat(u + u) * (n_t * u).cos();
    let omega = n as f64;
    let v = integrate_osc(&f, T::zero(), third_pi, omega)
        + integrate_osc(&f, third_pi, two_third_pi, omega);
    v * T::from_f64_c(std::f64::consts::SQRT_2) / T::PI()
}

/// High-pass tap `g_n = (√2/π) ∫_{π/3}^{4π/3} w(2u) φ̂(u) cos((n+1)u) du`.
fn g_tap<T: Real>(n: i64) -> T {
    let third_pi = T::from_f64_c(std::f64::consts::PI / 3.0);
    let two_third_pi = T::from_f64_c(PSI_SUPPORT_LO);
    let four_third_pi = T::from_f64_c(PHI_SUPPORT_HI);
    let c = T::from_i64_c(n + 1);
    let f = |u: T| psi_hat_modulus(u + u) * phi_hat(u) * (c * u).cos();
    let omega = (n + 1) as f64;
    let v = integrate_osc(&f, third_pi, two_third_pi, omega)
        + integrate_osc(&f, two_third_pi, four_third_pi, omega);
    v * T::from_f64_c(std::f64::consts::SQRT_2) / T::PI()
}

/// Compute the filter pair truncated at the minimal half-length whose
/// discarded energy is below `tol`.
///
/// Fails (reporting the best achieved tail) if no `L ≤ 4096` suffices.
pub fn filter_pair<T: Real>(tol: T) -> Result<FilterPair<T>> {
    if !(tol > T::zero()) {
        return Err(Error::invalid("filter tolerance must be positive"));
    }
    // h is even about 0, g about -1: compute one wing each and mirror.
    let h0: T = h_tap(0);
    let g0: T = g_tap(-1);
    let mut h_wing: Vec<T> = Vec::new(); // h_n for n = 1, 2, …
    let mut g_wing: Vec<T> = Vec::new(); // g_{-1+m} for m = 1, 2, …
    let mut h_energy = h0 * h0;
    let mut g_energy = g0 * g0;
    let two = T::from_f64_c(2.0);
    let mut found: Option<i64> = None;
    for l in 1..=FILTER_MAX_HALF_LEN {
        let hn: T = h_tap(l);
        let gm: T = g_tap(-1 + l);
        h_wing.push(hn);
        g_wing.push(gm);
        h_energy += two * hn * hn;
        g_energy += two * gm * gm;
        let h_tail = (T::one() - h_energy).max(T::zero());
        let g_tail = (T::one() - g_energy).max(T::zero());
        if h_tail < tol && g_tail < tol {
            found = Some(l);
            break;
        }
    }
    let Some(l) = found else {
        let achieved = (T::one() - h_energy.min(g_energy)).max(T::zero());
        return Err(Error::Accuracy {
            target: tol.to_f64().unwrap_or(0.0),
            achieved: achieved.to_f64().unwrap_or(f64::NAN),
            context: format!("filter tail energy at maximal half-length {FILTER_MAX_HALF_LEN}"),
        });
    };
    let tail_energy = {
        let h_tail = (T::one() - h_energy).max(T::zero());
        let g_tail = (T::one() - g_energy).max(T::zero());
        h_tail.max(g_tail)
    };
    let len = (2 * l + 1) as usize;
    let mut h_taps = vec![T::zero(); len];
    let mut g_taps = vec![T::zero(); len];
    for off in 0..len {
        let m = off as i64 - l; // distance from the symmetry center
        let idx = m.unsigned_abs() as usize;
        h_taps[off] = if idx == 0 { h0 } else { h_wing[idx - 1] };
        g_taps[off] = if idx == 0 { g0 } else { g_wing[idx - 1] };
    }
    Ok(FilterPair {
        h: Filter { n_min: -l, taps: h_taps },
        g: Filter { n_min: -1 - l, taps: g_taps },
        half_len: l,
        tail_energy,
        basis_version: BASIS_VERSION.to_string(),
    })
}

impl<T: Real> FilterPair<T> {
    /// Serialize to a JSON cache file (taps plus tail metadata).
    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)
            .map_err(|e| Error::Format(format!("filter cache write: {e}")))?;
        Ok(())
    }

    /// Load from a JSON cache file, rejecting mismatched basis versions.
    pub fn load_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let pair: FilterPair<T> = serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::Format(format!("filter cache read: {e}")))?;
        if pair.basis_version != BASIS_VERSION {
            return Err(Error::Format(format!(
                "filter cache built for basis {:?}, current is {BASIS_VERSION:?}",
                pair.basis_version
            )));
        }
        Ok(pair)
    }
}

/// Partition-of-unity residual `|φ̂(ξ)|² + Σ_{j≥0} |ψ̂(2^{-j}ξ)|² - 1`
/// (levels outside the support contribute nothing; the sum is finite).
///
/// Exposed for tests; the residual is zero to rounding for every `ξ`.
pub fn partition_residual<T: Real>(xi: T) -> T {
    let mut acc = phi_hat(xi).powi(2);
    let a = xi.abs().to_f64().unwrap_or(0.0);
    if a > 0.0 {
        // |2^{-j}ξ| intersects [2π/3, 8π/3] only for finitely many j ≥ 0.
        let j_hi = (a / PSI_SUPPORT_LO).log2().ceil() as i32;
        for j in 0..=j_hi.max(0) {
            acc += psi_hat_modulus(xi * T::exp2_i(-j)).powi(2);
        }
    }
    acc - T::one()
}
