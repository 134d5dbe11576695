//! Fractional potential tables for tensor wavelet elements.
//!
//! The expansion coefficients of the process are differences of the Riesz
//! potential `I^a = (-Δ)^{-a/2}` (with `a = α + 1`) applied to the tensor
//! element, and the dual-recovery analysis needs the conjugate fractional
//! derivative `D^a = (-Δ)^{a/2}`. Both are Fourier multipliers:
//!
//! ```text
//! F[I^a ψ^(eps)](ξ) = ‖ξ‖^{-a} Π_i env_i(ξ_i) e^{i ξ_i eps_i / 2},
//! ```
//!
//! with `env_i = φ̂` or `w = |ψ̂|`. Every admissible `eps` contains a wavelet
//! factor, so the integrand vanishes on `‖ξ‖ < 2π/3` and the multiplier is
//! never singular on the support: the spectrum is compactly supported and as
//! smooth as the basis ramp (`C³`), hence the potential decays like
//! `‖x‖^{-4}`.
//!
//! Tables are built by sampling that spectrum on a uniform grid and applying
//! one inverse FFT. Sampling in frequency periodizes space, so with period
//! `P` the table holds `Σ_m V(x + Pm)` — the wrap-around error is the
//! `O(P^{-4})` tail, driven below `1e-12` by the default geometry. The real
//! phase factors are absorbed by evaluating the even function `W` (built
//! from the moduli alone) at `x + eps/2`, which also lands exactly on grid
//! nodes since the step divides `1/2`. Off-grid queries go through quintic
//! spline interpolation, keeping total evaluation error under `1e-6`
//! everywhere (measured ~`1e-8` for `I^a`).
//!
//! A [`TableStore`] memoizes tables per (kind, exponent, envelope pattern),
//! canonicalizes `eps` by sorting wavelet axes first (tables for permuted
//! patterns are coordinate permutations of each other), counts out-of-window
//! truncations, and optionally persists tables to a content-keyed disk
//! cache.

use crate::error::{Error, Result};
use crate::fftutil::{fft2_square_in_place, fft_in_place};
use crate::interp::{quintic_weights, Spline1, Spline2};
use crate::quad::integrate_osc;
use crate::meyer::{phi_hat, psi_hat_modulus, BASIS_VERSION};
use crate::real::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{Read as _, Write as _};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

/// Which fractional operator the table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PotentialKind {
    /// Riesz potential `I^a`: multiplier `‖ξ‖^{-a}`.
    Integral,
    /// Fractional derivative `D^a`: multiplier `‖ξ‖^{+a}`.
    Derivative,
}

/// Grid geometry of a table build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableGeometry {
    /// FFT size per axis.
    pub n_fft: usize,
    /// Spatial step.
    pub delta: f64,
    /// Stored half-extent: samples cover `|x_i| ≤ extent`.
    pub extent: f64,
}

impl TableGeometry {
    /// Default geometry for dimension `d ∈ {1, 2}`: step `1/16` with periods
    /// 1024 (`d = 1`, table stored whole) and 256 (`d = 2`, central window
    /// `|x|_∞ ≤ 64` stored).
    pub fn default_for_dim(d: usize) -> Result<Self> {
        match d {
            1 => Ok(TableGeometry { n_fft: 16384, delta: 1.0 / 16.0, extent: 511.0 }),
            2 => Ok(TableGeometry { n_fft: 4096, delta: 1.0 / 16.0, extent: 64.0 }),
            _ => Err(Error::invalid(format!(
                "potential tables support d ∈ {{1, 2}}, got d = {d} \
                 (higher dimensions exceed desk-scale memory)"
            ))),
        }
    }

    /// Spatial period `N·δ` of the build.
    pub fn period(&self) -> f64 {
        self.n_fft as f64 * self.delta
    }
}

/// One interpolated potential table for a canonical envelope pattern.
#[derive(Debug)]
pub struct PotentialTable<T> {
    kind: PotentialKind,
    exponent: T,
    pattern: Vec<u8>,
    geometry: TableGeometry,
    spline1: Option<Spline1<T>>,
    spline2: Option<Spline2<T>>,
    query_extent: T,
    shell_bound: T,
    build_imag_max: T,
    decay_c4: T,
    decay_p_hat: T,
    lattice_sum: T,
}

/// Decay statistics of a sampled potential: the envelope constant
/// `C₄ = max |V(x)| (1 + ‖x‖)⁴` and the fitted decay exponent `p̂`
/// (least-squares slope of log shell maxima against log radius over dyadic
/// shells `‖x‖ ∈ [2^s, 2^{s+1})`, `s ≥ 1`).
fn decay_stats<T: Real>(nodes: impl Iterator<Item = (f64, T)>) -> (T, T) {
    let mut c4 = 0.0f64;
    // Shell s holds radii [2^{s+1}, 2^{s+2}).
    let mut shell_max = [0.0f64; 48];
    for (r, v) in nodes {
        let a = v.to_f64().unwrap_or(0.0).abs();
        c4 = c4.max(a * (1.0 + r).powi(4));
        if r >= 2.0 {
            let s = (r.log2().floor() as usize - 1).min(shell_max.len() - 1);
            shell_max[s] = shell_max[s].max(a);
        }
    }
    // Log-log regression over the populated shells (geometric mid radius).
    let pts: Vec<(f64, f64)> = shell_max
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(s, &m)| {
            let lo = (1u64 << (s + 1)) as f64;
            ((lo * lo * 2.0).sqrt().ln(), m.ln())
        })
        .collect();
    let p_hat = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        -(n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    (T::from_f64_c(c4), T::from_f64_c(p_hat))
}

fn envelope<T: Real>(e: u8, xi: T) -> T {
    if e == 0 {
        phi_hat(xi)
    } else {
        psi_hat_modulus(xi)
    }
}

/// Signed FFT bin index for slot `m` of an `n`-point transform.
#[inline]
fn signed_bin(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

impl<T: Real + rustfft::FftNum> PotentialTable<T> {
    /// Build the table for the canonical `pattern` (wavelet axes first).
    ///
    /// `exponent` is `a = α + 1 ∈ (d/2, d/2 + 1)` for the processes served
    /// here; any positive exponent below the integrability threshold of the
    /// multiplier is accepted.
    pub fn build(kind: PotentialKind, exponent: T, pattern: &[u8]) -> Result<Self> {
        Self::build_with_geometry(kind, exponent, pattern, None)
    }

    /// Build with an explicit geometry (tests shrink it; `None` = default).
    pub fn build_with_geometry(
        kind: PotentialKind,
        exponent: T,
        pattern: &[u8],
        geometry: Option<TableGeometry>,
    ) -> Result<Self> {
        let d = pattern.len();
        if !(exponent > T::zero()) {
            return Err(Error::invalid("potential exponent must be positive"));
        }
        if pattern.iter().any(|&e| e > 1) || pattern.iter().all(|&e| e == 0) {
            return Err(Error::invalid(
                "envelope pattern must be 0/1 with at least one wavelet axis",
            ));
        }
        if pattern.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(
                "envelope pattern must be canonical (wavelet axes first); \
                 permuted queries are handled by the table store",
            ));
        }
        let geometry = match geometry {
            Some(g) => g,
            None => TableGeometry::default_for_dim(d)?,
        };
        match d {
            1 => Self::build_1d(kind, exponent, pattern, geometry),
            2 => Self::build_2d(kind, exponent, pattern, geometry),
            _ => Err(Error::invalid("potential tables support d ∈ {1, 2}")),
        }
    }

    fn multiplier(kind: PotentialKind, exponent: T, norm_sq: T) -> T {
        // ‖ξ‖^{∓a} via exp/ln on the squared norm; callers guarantee the
        // envelope vanishes near ‖ξ‖ = 0 for the Integral kind.
        let half = T::from_f64_c(0.5);
        let log = norm_sq.ln() * half;
        match kind {
            PotentialKind::Integral => (-exponent * log).exp(),
            PotentialKind::Derivative => (exponent * log).exp(),
        }
    }

    fn build_1d(
        kind: PotentialKind,
        exponent: T,
        pattern: &[u8],
        geometry: TableGeometry,
    ) -> Result<Self> {
        let n = geometry.n_fft;
        let period = T::from_f64_c(geometry.period());
        let delta = T::from_f64_c(geometry.delta);
        let two_pi = T::PI() + T::PI();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n];
        for (m, slot) in data.iter_mut().enumerate() {
            let xi = two_pi * T::from_i64_c(signed_bin(m, n)) / period;
            let env = envelope(pattern[0], xi);
            if env != T::zero() {
                let mult = Self::multiplier(kind, exponent, xi * xi);
                *slot = Complex::new(env * mult, T::zero());
            }
        }
        fft_in_place(&mut data, true);
        // W(δ·n) = (inverse DFT)/P; fftshift into ascending x order.
        let mut samples = vec![T::zero(); n];
        let mut imag_max = T::zero();
        let half_n = n / 2;
        for (m, v) in data.iter().enumerate() {
            let shifted = (m + half_n) % n; // x index 0 ↦ -P/2
            samples[shifted] = v.re / period;
            imag_max = imag_max.max((v.im / period).abs());
        }
        let x_min = -T::from_f64_c(geometry.period() / 2.0);
        let query_extent = T::from_f64_c(geometry.extent - 1.0);
        let mut shell_bound = T::zero();
        let mut lattice_sum = T::zero();
        for (i, &s) in samples.iter().enumerate() {
            let x = x_min + delta * T::from_usize_c(i);
            if x.abs() > query_extent {
                shell_bound = shell_bound.max(s.abs());
            }
            lattice_sum += s;
        }
        lattice_sum *= delta;
        let x_min_f = -geometry.period() / 2.0;
        let (decay_c4, decay_p_hat) = decay_stats(
            samples
                .iter()
                .enumerate()
                .map(|(i, &s)| ((x_min_f + geometry.delta * i as f64).abs(), s)),
        );
        let spline1 = Spline1::fit(x_min, delta, samples);
        Ok(PotentialTable {
            kind,
            exponent,
            pattern: pattern.to_vec(),
            geometry,
            spline1: Some(spline1),
            spline2: None,
            query_extent,
            shell_bound,
            build_imag_max: imag_max,
            decay_c4,
            decay_p_hat,
            lattice_sum,
        })
    }

    fn build_2d(
        kind: PotentialKind,
        exponent: T,
        pattern: &[u8],
        geometry: TableGeometry,
    ) -> Result<Self> {
        let n = geometry.n_fft;
        let period_f = geometry.period();
        if geometry.extent >= period_f / 2.0 {
            return Err(Error::invalid("stored extent must be below half the period"));
        }
        let period = T::from_f64_c(period_f);
        let delta = T::from_f64_c(geometry.delta);
        let two_pi = T::PI() + T::PI();
        // Per-axis envelope samples (the spectrum factorizes; the multiplier
        // does not).
        let axis_xi: Vec<T> = (0..n)
            .map(|m| two_pi * T::from_i64_c(signed_bin(m, n)) / period)
            .collect();
        let env_rows: Vec<T> = axis_xi.iter().map(|&xi| envelope(pattern[0], xi)).collect();
        let env_cols: Vec<T> = axis_xi.iter().map(|&xi| envelope(pattern[1], xi)).collect();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for r in 0..n {
            let er = env_rows[r];
            if er == T::zero() {
                continue;
            }
            let xr2 = axis_xi[r] * axis_xi[r];
            let row = &mut data[r * n..(r + 1) * n];
            for (c, slot) in row.iter_mut().enumerate() {
                let ec = env_cols[c];
                if ec == T::zero() {
                    continue;
                }
                let norm_sq = xr2 + axis_xi[c] * axis_xi[c];
                let mult = Self::multiplier(kind, exponent, norm_sq);
                *slot = Complex::new(er * ec * mult, T::zero());
            }
        }
        fft2_square_in_place(&mut data, n, true);
        let scale = (period * period).recip();
        // Extract the central window |x|_∞ ≤ extent and record the largest
        // magnitude outside the query region (the truncation bound).
        let half_cells = (geometry.extent / geometry.delta).round() as i64;
        let side = (2 * half_cells + 1) as usize;
        let query_extent = T::from_f64_c(geometry.extent - 1.0);
        let query_cells = ((geometry.extent - 1.0) / geometry.delta).floor() as i64;
        let mut shell_bound = T::zero();
        let mut imag_max = T::zero();
        let mut lattice_sum = T::zero();
        for (idx, v) in data.iter().enumerate() {
            let r = signed_bin(idx / n, n);
            let c = signed_bin(idx % n, n);
            if r.abs() > query_cells || c.abs() > query_cells {
                shell_bound = shell_bound.max((v.re * scale).abs());
            }
            imag_max = imag_max.max((v.im * scale).abs());
            lattice_sum += v.re * scale;
        }
        lattice_sum *= delta * delta;
        let mut samples = vec![T::zero(); side * side];
        for sr in 0..side {
            let nr = sr as i64 - half_cells;
            let fr = (nr.rem_euclid(n as i64)) as usize;
            for sc in 0..side {
                let nc = sc as i64 - half_cells;
                let fc = (nc.rem_euclid(n as i64)) as usize;
                samples[sr * side + sc] = data[fr * n + fc].re * scale;
            }
        }
        drop(data);
        let x_min = -T::from_f64_c(geometry.extent);
        let x_min_f = -geometry.extent;
        let (decay_c4, decay_p_hat) = decay_stats(samples.iter().enumerate().map(|(i, &s)| {
            let r = x_min_f + geometry.delta * (i / side) as f64;
            let c = x_min_f + geometry.delta * (i % side) as f64;
            ((r * r + c * c).sqrt(), s)
        }));
        let spline2 = Spline2::fit(x_min, x_min, delta, side, side, samples);
        Ok(PotentialTable {
            kind,
            exponent,
            pattern: pattern.to_vec(),
            geometry,
            spline1: None,
            spline2: Some(spline2),
            query_extent,
            shell_bound,
            build_imag_max: imag_max,
            decay_c4,
            decay_p_hat,
            lattice_sum,
        })
    }

    /// Dimension of the table.
    pub fn dim(&self) -> usize {
        self.pattern.len()
    }

    /// Operator kind.
    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// Multiplier exponent `a`.
    pub fn exponent(&self) -> T {
        self.exponent
    }

    /// Canonical envelope pattern.
    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    /// Build geometry.
    pub fn geometry(&self) -> TableGeometry {
        self.geometry
    }

    /// Magnitude bound on the potential outside the queryable window: any
    /// truncated evaluation drops a value of at most this size.
    pub fn shell_bound(&self) -> T {
        self.shell_bound
    }

    /// Largest imaginary residual of the inverse FFT (the exact transform is
    /// real); a build sanity diagnostic.
    pub fn build_imag_max(&self) -> T {
        self.build_imag_max
    }

    /// Decay envelope constant: `|V(x)| ≤ decay_c4 / (1 + ‖x‖)⁴` over the
    /// stored grid (the `C³` spectrum guarantees at least fourth-order
    /// decay).
    pub fn decay_c4(&self) -> T {
        self.decay_c4
    }

    /// Fitted decay exponent: slope of log shell maxima against log radius;
    /// at least 4 for every table built here.
    pub fn decay_p_hat(&self) -> T {
        self.decay_p_hat
    }

    /// Full-period lattice sum `Σ_nodes V · δ^d`: a discrete stand-in for
    /// `∫V = 0` (every admissible pattern has a wavelet axis, so the
    /// spectrum vanishes at the origin). Roundoff-level in practice.
    pub fn lattice_sum(&self) -> T {
        self.lattice_sum
    }

    /// Fill `out[i] = V(x_first - i)` for `i < n` (actual element, the
    /// half-shift is applied internally); out-of-window queries are written
    /// as 0 and counted in the return value.
    ///
    /// All queries share one fractional offset because the unit spacing is an
    /// integer number of grid cells, so the interpolation weights are
    /// computed once for the whole block.
    pub fn fill_block1(&self, x_first: T, n: usize, out: &mut [T]) -> u64 {
        debug_assert!(self.dim() == 1 && out.len() >= n);
        let spline = self.spline1.as_ref().expect("1-d table");
        let (x0, inv_dx, coeffs) = spline.raw();
        let half = T::from_f64_c(0.5);
        let shift = if self.pattern[0] == 1 { half } else { T::zero() };
        let stride = self.cell_stride();
        let u0 = (x_first + shift - x0) * inv_dx;
        let u_lo = (-self.query_extent + shift - x0) * inv_dx;
        let u_hi = (self.query_extent + shift - x0) * inv_dx;
        let b0 = u0.floor();
        let w = quintic_weights(u0 - b0);
        let base0 = match b0.to_f64() {
            Some(v) => v as i64,
            None => return n as u64,
        };
        let mut truncated = 0u64;
        let stride_t = T::from_i64_c(stride);
        for (i, slot) in out[..n].iter_mut().enumerate() {
            let u = u0 - stride_t * T::from_usize_c(i);
            let base = base0 - stride * i as i64;
            if u < u_lo || u > u_hi || base < 2 || (base + 3) as usize >= coeffs.len() {
                *slot = T::zero();
                truncated += 1;
                continue;
            }
            let row = &coeffs[(base - 2) as usize..(base + 4) as usize];
            let mut acc = T::zero();
            for (q, wq) in w.iter().enumerate() {
                acc += *wq * row[q];
            }
            *slot = acc;
        }
        truncated
    }

    /// Fill `out[i·n[1] + j] = V(x_first[0] - i, x_first[1] - j)` (actual
    /// element; row-major); out-of-window queries are written as 0 and
    /// counted. Interpolation weights are shared per axis as in
    /// [`Self::fill_block1`].
    pub fn fill_block2(&self, x_first: [T; 2], n: [usize; 2], out: &mut [T]) -> u64 {
        debug_assert!(self.dim() == 2 && out.len() >= n[0] * n[1]);
        let spline = self.spline2.as_ref().expect("2-d table");
        let (x0, y0, inv_dx, n_rows, n_cols, coeffs) = spline.raw();
        let half = T::from_f64_c(0.5);
        let stride = self.cell_stride();
        let stride_t = T::from_i64_c(stride);
        let mut axis_u0 = [T::zero(); 2];
        let mut axis_lo = [T::zero(); 2];
        let mut axis_hi = [T::zero(); 2];
        let mut axis_base = [0i64; 2];
        let mut axis_w = [[T::zero(); 6]; 2];
        let mut degenerate = false;
        for axis in 0..2 {
            let shift = if self.pattern[axis] == 1 { half } else { T::zero() };
            let origin = if axis == 0 { x0 } else { y0 };
            let u0 = (x_first[axis] + shift - origin) * inv_dx;
            axis_u0[axis] = u0;
            axis_lo[axis] = (-self.query_extent + shift - origin) * inv_dx;
            axis_hi[axis] = (self.query_extent + shift - origin) * inv_dx;
            let b0 = u0.floor();
            axis_w[axis] = quintic_weights(u0 - b0);
            match b0.to_f64() {
                Some(v) => axis_base[axis] = v as i64,
                None => degenerate = true,
            }
        }
        if degenerate {
            for slot in out[..n[0] * n[1]].iter_mut() {
                *slot = T::zero();
            }
            return (n[0] * n[1]) as u64;
        }
        // Per-axis validity masks, then the dense 6x6 tensor contraction on
        // valid pairs (row-major accumulation order is part of the
        // determinism contract).
        let valid = |axis: usize, i: usize, limit: usize| -> Option<usize> {
            let u = axis_u0[axis] - stride_t * T::from_usize_c(i);
            let base = axis_base[axis] - stride * i as i64;
            if u < axis_lo[axis] || u > axis_hi[axis] || base < 2 || (base + 3) as usize >= limit {
                None
            } else {
                Some((base - 2) as usize)
            }
        };
        let mut truncated = 0u64;
        let wx = axis_w[0];
        let wy = axis_w[1];
        for i in 0..n[0] {
            let row_out = &mut out[i * n[1]..i * n[1] + n[1]];
            let Some(r0) = valid(0, i, n_rows) else {
                for slot in row_out.iter_mut() {
                    *slot = T::zero();
                }
                truncated += n[1] as u64;
                continue;
            };
            for (j, slot) in row_out.iter_mut().enumerate() {
                let Some(c0) = valid(1, j, n_cols) else {
                    *slot = T::zero();
                    truncated += 1;
                    continue;
                };
                let mut acc = T::zero();
                for (p, wp) in wx.iter().enumerate() {
                    let row = &coeffs[(r0 + p) * n_cols + c0..(r0 + p) * n_cols + c0 + 6];
                    let mut rowacc = T::zero();
                    for (q, wq) in wy.iter().enumerate() {
                        rowacc += *wq * row[q];
                    }
                    acc += *wp * rowacc;
                }
                *slot = acc;
            }
        }
        truncated
    }

    /// Grid cells per unit length (the step `δ` always divides 1 here).
    fn cell_stride(&self) -> i64 {
        (1.0 / self.geometry.delta).round() as i64
    }

    /// Potential of the *centered even* profile at `x` (no half-shift), or
    /// `None` when `x` leaves the queryable window `|x|_∞ ≤ extent - 1`.
    pub fn eval_centered(&self, x: &[T]) -> Option<T> {
        if x.len() != self.dim() {
            return None;
        }
        if x.iter().any(|v| v.abs() > self.query_extent) {
            return None;
        }
        match self.dim() {
            1 => self.spline1.as_ref().and_then(|s| s.eval(x[0])),
            2 => self.spline2.as_ref().and_then(|s| s.eval(x[0], x[1])),
            _ => None,
        }
    }

    /// Potential of the actual tensor element with this pattern: the
    /// half-sample shift `x + pattern/2` restores the wavelet phase factors.
    pub fn eval(&self, x: &[T]) -> Option<T> {
        let half = T::from_f64_c(0.5);
        let mut shifted = [T::zero(); 2];
        for i in 0..self.dim() {
            shifted[i] = x[i]
                + if self.pattern[i] == 1 {
                    half
                } else {
                    T::zero()
                };
        }
        self.eval_centered(&shifted[..self.dim()])
    }
}

/// Memoization key: operator kind, exponent bit pattern, envelope pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct TableKey {
    kind: PotentialKind,
    exponent_bits: u64,
    pattern: Vec<u8>,
}

/// Builds, memoizes, and serves potential tables; counts truncated queries.
#[derive(Debug)]
pub struct TableStore<T> {
    map: Mutex<HashMap<TableKey, Arc<PotentialTable<T>>>>,
    cache_dir: Option<PathBuf>,
    truncations: AtomicU64,
}

impl<T: Real + rustfft::FftNum> Default for TableStore<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Direct-quadrature potential of a tensor element: the Fourier inversion
/// integral evaluated with oscillation-aware Gauss–Legendre panels instead of
/// the FFT table. Slow; the interpolation oracle for tests.
///
/// Accepts any admissible `eps` (no canonicalization needed — axes factor).
pub fn potential_exact<T: Real>(
    kind: PotentialKind,
    exponent: T,
    eps: &[u8],
    x: &[T],
) -> Result<T> {
    let d = eps.len();
    if d != x.len() || !(1..=2).contains(&d) {
        return Err(Error::invalid("exact potential evaluation supports d ∈ {1, 2}"));
    }
    if eps.iter().any(|&e| e > 1) || eps.iter().all(|&e| e == 0) {
        return Err(Error::invalid(
            "envelope pattern must be 0/1 with at least one wavelet axis",
        ));
    }
    if !(exponent > T::zero()) {
        return Err(Error::invalid("potential exponent must be positive"));
    }
    let half = T::from_f64_c(0.5);
    let sign = match kind {
        PotentialKind::Integral => -exponent,
        PotentialKind::Derivative => exponent,
    };
    let power = move |norm_sq: T| (sign * norm_sq.ln() * half).exp();
    // Smooth panels of each axis envelope (ramp joints of the basis).
    let third = T::PI() / T::from_f64_c(3.0);
    let panels = |e: u8| -> Vec<(T, T)> {
        let (p2, p4, p8) = (third + third, third * T::from_f64_c(4.0), third * T::from_f64_c(8.0));
        if e == 1 {
            vec![(p2, p4), (p4, p8)]
        } else {
            vec![(T::zero(), p2), (p2, p4)]
        }
    };
    let c: Vec<T> = (0..d)
        .map(|i| x[i] + if eps[i] == 1 { half } else { T::zero() })
        .collect();
    let inv_pi = T::PI().recip();
    if d == 1 {
        let omega = c[0].to_f64().unwrap_or(0.0).abs();
        let mut total = T::zero();
        for (a, b) in panels(eps[0]) {
            total += integrate_osc(
                |xi: T| envelope(eps[0], xi) * power(xi * xi) * (c[0] * xi).cos(),
                a,
                b,
                omega,
            );
        }
        return Ok(total * inv_pi);
    }
    let omega0 = c[0].to_f64().unwrap_or(0.0).abs();
    let omega1 = c[1].to_f64().unwrap_or(0.0).abs();
    let inner_panels = panels(eps[1]);
    let mut total = T::zero();
    for (a0, b0) in panels(eps[0]) {
        total += integrate_osc(
            |xi0: T| {
                let e0 = envelope(eps[0], xi0);
                if e0 == T::zero() {
                    return T::zero();
                }
                let xi0_sq = xi0 * xi0;
                let mut inner = T::zero();
                for &(a1, b1) in &inner_panels {
                    inner += integrate_osc(
                        |xi1: T| {
                            envelope(eps[1], xi1) * power(xi0_sq + xi1 * xi1) * (c[1] * xi1).cos()
                        },
                        a1,
                        b1,
                        omega1,
                    );
                }
                e0 * (c[0] * xi0).cos() * inner
            },
            a0,
            b0,
            omega0,
        );
    }
    Ok(total * inv_pi * inv_pi)
}

/// Canonicalization of an `eps` pattern: the permutation that lists wavelet
/// axes first (stable within each group), and the sorted pattern.
pub fn canonical_pattern(eps: &[u8]) -> (Vec<usize>, Vec<u8>) {
    let mut order: Vec<usize> = (0..eps.len()).collect();
    order.sort_by_key(|&i| (eps[i] == 0) as u8);
    let pattern = order.iter().map(|&i| eps[i]).collect();
    (order, pattern)
}

impl<T: Real + rustfft::FftNum> TableStore<T> {
    /// In-memory store.
    pub fn new() -> Self {
        TableStore {
            map: Mutex::new(HashMap::new()),
            cache_dir: None,
            truncations: AtomicU64::new(0),
        }
    }

    /// Store that persists built tables under `dir` (content-keyed files).
    pub fn with_cache_dir(dir: PathBuf) -> Self {
        TableStore {
            map: Mutex::new(HashMap::new()),
            cache_dir: Some(dir),
            truncations: AtomicU64::new(0),
        }
    }

    /// Fetch (building or loading if needed) the table for `eps`, returned
    /// together with the coordinate permutation mapping query points onto
    /// the canonical pattern.
    pub fn get(
        &self,
        kind: PotentialKind,
        exponent: T,
        eps: &[u8],
    ) -> Result<(Arc<PotentialTable<T>>, Vec<usize>)> {
        let (perm, pattern) = canonical_pattern(eps);
        let key = TableKey {
            kind,
            exponent_bits: exponent.to_f64().unwrap_or(f64::NAN).to_bits(),
            pattern: pattern.clone(),
        };
        {
            let map = self.map.lock().unwrap();
            if let Some(t) = map.get(&key) {
                return Ok((Arc::clone(t), perm));
            }
        }
        // Build outside the lock: a concurrent duplicate build is possible
        // but harmless (identical deterministic result), and the table
        // construction is far too slow to hold a global lock across.
        let table = match self.try_load(&key) {
            Some(t) => Arc::new(t),
            None => {
                let built = PotentialTable::build(kind, exponent, &pattern)?;
                self.try_save(&key, &built);
                Arc::new(built)
            }
        };
        let mut map = self.map.lock().unwrap();
        let entry = map.entry(key).or_insert_with(|| Arc::clone(&table));
        Ok((Arc::clone(entry), perm))
    }

    /// Evaluate the potential of the tensor element `eps` at `x`, counting a
    /// truncation (and returning 0) when `x` falls outside the table window.
    pub fn eval_or_truncate(
        &self,
        table: &PotentialTable<T>,
        perm: &[usize],
        x: &[T],
    ) -> T {
        let mut permuted = [T::zero(); 2];
        for (slot, &src) in permuted.iter_mut().zip(perm.iter()) {
            *slot = x[src];
        }
        match table.eval(&permuted[..x.len()]) {
            Some(v) => v,
            None => {
                self.truncations.fetch_add(1, Ordering::Relaxed);
                T::zero()
            }
        }
    }

    /// Number of truncated queries since construction or the last reset.
    pub fn truncation_count(&self) -> u64 {
        self.truncations.load(Ordering::Relaxed)
    }

    /// Reset the truncation counter.
    pub fn reset_truncations(&self) {
        self.truncations.store(0, Ordering::Relaxed);
    }

    fn cache_path(&self, key: &TableKey) -> Option<PathBuf> {
        use sha2::{Digest, Sha256};
        let dir = self.cache_dir.as_ref()?;
        let mut hasher = Sha256::new();
        hasher.update(BASIS_VERSION.as_bytes());
        hasher.update(b"|potential-table-v2|");
        hasher.update(format!("{:?}|{:016x}|{:?}", key.kind, key.exponent_bits, key.pattern));
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(16).map(|b| format!("{b:02x}")).collect();
        Some(dir.join(format!("potential-{hex}.tbl")))
    }

    fn try_load(&self, key: &TableKey) -> Option<PotentialTable<T>> {
        let path = self.cache_path(key)?;
        let mut file = std::fs::File::open(path).ok()?;
        let mut header_len = [0u8; 8];
        file.read_exact(&mut header_len).ok()?;
        let mut header_bytes = vec![0u8; u64::from_le_bytes(header_len) as usize];
        file.read_exact(&mut header_bytes).ok()?;
        let header: CacheHeader = serde_json::from_slice(&header_bytes).ok()?;
        if header.basis_version != BASIS_VERSION
            || header.kind != key.kind
            || header.exponent_bits != key.exponent_bits
            || header.pattern != key.pattern
        {
            return None;
        }
        let mut raw = Vec::new();
        file.read_to_end(&mut raw).ok()?;
        if raw.len() != header.count * 8 {
            return None;
        }
        let samples: Vec<T> = raw
            .chunks_exact(8)
            .map(|c| T::from_f64_c(f64::from_le_bytes(c.try_into().unwrap())))
            .collect();
        let geometry = header.geometry;
        let delta = T::from_f64_c(geometry.delta);
        let query_extent = T::from_f64_c(geometry.extent - 1.0);
        let (spline1, spline2) = match key.pattern.len() {
            1 => (
                Some(Spline1::fit(
                    -T::from_f64_c(geometry.period() / 2.0),
                    delta,
                    samples,
                )),
                None,
            ),
            2 => {
                let side = (samples.len() as f64).sqrt().round() as usize;
                if side * side != samples.len() {
                    return None;
                }
                let x_min = -T::from_f64_c(geometry.extent);
                (None, Some(Spline2::fit(x_min, x_min, delta, side, side, samples)))
            }
            _ => return None,
        };
        Some(PotentialTable {
            kind: key.kind,
            exponent: T::from_f64_c(f64::from_bits(key.exponent_bits)),
            pattern: key.pattern.clone(),
            geometry,
            spline1,
            spline2,
            query_extent,
            shell_bound: T::from_f64_c(header.shell_bound),
            build_imag_max: T::from_f64_c(header.build_imag_max),
            decay_c4: T::from_f64_c(header.decay_c4),
            decay_p_hat: T::from_f64_c(header.decay_p_hat),
            lattice_sum: T::from_f64_c(header.lattice_sum),
        })
    }

    fn try_save(&self, key: &TableKey, table: &PotentialTable<T>) {
        let Some(path) = self.cache_path(key) else {
            return;
        };
        // Reconstructing raw samples from the spline is not possible without
        // keeping them; rebuild instead of persisting when unavailable. To
        // keep the format simple the save re-derives samples by evaluating
        // the grid through the spline (exact at collocation nodes).
        let Some(dir) = path.parent() else { return };
        if std::fs::create_dir_all(dir).is_err() {
            return;
        }
        let geometry = table.geometry;
        let delta = geometry.delta;
        let samples: Vec<f64> = match table.dim() {
            1 => {
                let n = geometry.n_fft;
                let x_min = -geometry.period() / 2.0;
                (0..n)
                    .map(|i| {
                        let x = T::from_f64_c(x_min + delta * i as f64);
                        table
                            .spline1
                            .as_ref()
                            .and_then(|s| s.eval(x))
                            .unwrap_or(T::zero())
                            .to_f64()
                            .unwrap_or(0.0)
                    })
                    .collect()
            }
            2 => {
                let half_cells = (geometry.extent / delta).round() as i64;
                let side = (2 * half_cells + 1) as usize;
                let x_min = -geometry.extent;
                (0..side * side)
                    .map(|i| {
                        let r = (i / side) as f64;
                        let c = (i % side) as f64;
                        let x = T::from_f64_c(x_min + delta * r);
                        let y = T::from_f64_c(x_min + delta * c);
                        table
                            .spline2
                            .as_ref()
                            .and_then(|s| s.eval(x, y))
                            .unwrap_or(T::zero())
                            .to_f64()
                            .unwrap_or(0.0)
                    })
                    .collect()
            }
            _ => return,
        };
        let header = CacheHeader {
            basis_version: BASIS_VERSION.to_string(),
            kind: key.kind,
            exponent_bits: key.exponent_bits,
            pattern: key.pattern.clone(),
            geometry,
            shell_bound: table.shell_bound.to_f64().unwrap_or(0.0),
            build_imag_max: table.build_imag_max.to_f64().unwrap_or(0.0),
            decay_c4: table.decay_c4.to_f64().unwrap_or(0.0),
            decay_p_hat: table.decay_p_hat.to_f64().unwrap_or(0.0),
            lattice_sum: table.lattice_sum.to_f64().unwrap_or(0.0),
            count: samples.len(),
        };
        let Ok(header_bytes) = serde_json::to_vec(&header) else {
            return;
        };
        let tmp = path.with_extension("tmp");
        let write = || -> std::io::Result<()> {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            f.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
            f.write_all(&header_bytes)?;
            for s in &samples {
                f.write_all(&s.to_le_bytes())?;
            }
            f.into_inner()?.sync_all()?;
            Ok(())
        };
        if write().is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        } else {
            let _ = std::fs::remove_file(&tmp);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    basis_version: String,
    kind: PotentialKind,
    exponent_bits: u64,
    pattern: Vec<u8>,
    geometry: TableGeometry,
    shell_bound: f64,
    build_imag_max: f64,
    decay_c4: f64,
    decay_p_hat: f64,
    lattice_sum: f64,
    count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_osc;
    use std::sync::OnceLock;

    /// Direct oscillatory-quadrature oracle for the 1-d potential:
    /// `V(x) = (1/π) ∫_{2π/3}^{8π/3} w(ξ) ξ^{∓a} cos(ξ(x + 1/2)) dξ`.
    fn direct_1d(kind: PotentialKind, a: f64, x: f64) -> f64 {
        let s = match kind {
            PotentialKind::Integral => -a,
            PotentialKind::Derivative => a,
        };
        let c = x + 0.5;
        let f = |xi: f64| psi_hat_modulus(xi) * xi.powf(s) * (xi * c).cos();
        let lo = crate::meyer::PSI_SUPPORT_LO;
        let mid = crate::meyer::PHI_SUPPORT_HI;
        let hi = crate::meyer::PSI_SUPPORT_HI;
        (integrate_osc(&f, lo, mid, c.abs()) + integrate_osc(&f, mid, hi, c.abs()))
            / std::f64::consts::PI
    }

    fn table_1d_i() -> &'static PotentialTable<f64> {
        static T1: OnceLock<PotentialTable<f64>> = OnceLock::new();
        T1.get_or_init(|| {
            PotentialTable::build(PotentialKind::Integral, 1.25, &[1]).unwrap()
        })
    }

    #[test]
    fn table_1d_matches_reference_values() {
        let t = table_1d_i();
        // Frozen independent-quadrature references (grid-aligned points).
        let cases = [
            (0.0, -0.091_505_350_105_277_851),
            (1.5, 0.021_389_583_228_474_756),
            (-3.25, -0.023_145_018_981_407_521),
        ];
        for (x, want) in cases {
            let got = t.eval(&[x]).unwrap();
            assert!(
                (got - want).abs() < 1e-10,
                "x={x}: got {got:.17e}, want {want:.17e}"
            );
        }
        assert!(t.build_imag_max() < 1e-12);
        // Far shell: periodization floor.
        assert!(t.shell_bound() < 1e-10, "{:e}", t.shell_bound());
    }

    #[test]
    fn table_1d_alternate_exponent() {
        let t: PotentialTable<f64> =
            PotentialTable::build(PotentialKind::Integral, 1.1, &[1]).unwrap();
        let got = t.eval(&[0.0]).unwrap();
        let want = -0.117_088_625_532_470_84;
        assert!((got - want).abs() < 1e-10, "{got:.17e}");
    }

    #[test]
    fn table_1d_derivative_kind() {
        let t: PotentialTable<f64> =
            PotentialTable::build(PotentialKind::Derivative, 1.25, &[1]).unwrap();
        let got = t.eval(&[0.75]).unwrap();
        let want = 2.506_886_196_045_233_3;
        assert!((got - want).abs() < 5e-9, "{got:.17e}");
    }

    #[test]
    fn interpolation_error_off_grid() {
        let t = table_1d_i();
        let mut worst = 0.0f64;
        for i in 0..40 {
            let x = -2.0 + 4.0 * (i as f64 + 0.411) / 40.0;
            let got = t.eval(&[x]).unwrap();
            let want = direct_1d(PotentialKind::Integral, 1.25, x);
            worst = worst.max((got - want).abs());
        }
        assert!(worst < 1e-6, "max interp err {worst:.3e}");
        // Derivative kind is rougher but must stay within the same budget.
        let td = PotentialTable::build(PotentialKind::Derivative, 1.25, &[1]).unwrap();
        let mut worst_d = 0.0f64;
        for i in 0..20 {
            let x = -1.5 + 3.0 * (i as f64 + 0.37) / 20.0;
            let got = td.eval(&[x]).unwrap();
            let want = direct_1d(PotentialKind::Derivative, 1.25, x);
            worst_d = worst_d.max((got - want).abs());
        }
        assert!(worst_d < 1e-6, "max derivative interp err {worst_d:.3e}");
    }

    #[test]
    fn truncation_outside_window() {
        let t = table_1d_i();
        assert!(t.eval(&[509.0]).is_some());
        assert!(t.eval(&[511.5]).is_none());
        let store: TableStore<f64> = TableStore::new();
        let (tt, perm) = store.get(PotentialKind::Integral, 1.25, &[1]).unwrap();
        assert_eq!(store.eval_or_truncate(&tt, &perm, &[600.0]), 0.0);
        assert_eq!(store.truncation_count(), 1);
        store.reset_truncations();
        assert_eq!(store.truncation_count(), 0);
    }

    fn tables_2d() -> &'static (PotentialTable<f64>, PotentialTable<f64>) {
        static T2: OnceLock<(PotentialTable<f64>, PotentialTable<f64>)> = OnceLock::new();
        T2.get_or_init(|| {
            let mixed = PotentialTable::build(PotentialKind::Integral, 1.7, &[1, 0]).unwrap();
            let pure = PotentialTable::build(PotentialKind::Integral, 1.7, &[1, 1]).unwrap();
            (mixed, pure)
        })
    }

    #[test]
    fn table_2d_matches_reference_values() {
        let (mixed, pure) = tables_2d();
        // Frozen two-method references, ~12 digits; pure pattern (1,1).
        let cases_pure = [
            ((0.0, 0.0), 0.016_965_055_220),
            ((1.0, -2.0), 0.002_167_060_275),
            ((0.5, 0.25), 0.004_525_087_868),
            ((-3.25, 4.5), 0.000_146_395_223),
        ];
        for ((x, y), want) in cases_pure {
            let got = pure.eval(&[x, y]).unwrap();
            assert!(
                (got - want).abs() < 1e-9,
                "pure ({x},{y}): got {got:.14e}, want {want:.14e}"
            );
        }
        // Mixed references were frozen for eps = (0,1) = φ⊗ψ; the canonical
        // table holds (1,0), so query with swapped coordinates.
        let cases_mixed = [
            ((0.0, 0.0), -0.041_440_597_633),
            ((1.0, -2.0), 0.001_195_114_199),
            ((0.5, 0.25), -0.037_177_520_900),
            ((-3.25, 4.5), 0.000_080_820_555),
        ];
        for ((x, y), want) in cases_mixed {
            let got = mixed.eval(&[y, x]).unwrap();
            assert!(
                (got - want).abs() < 1e-9,
                "mixed ({x},{y}): got {got:.14e}, want {want:.14e}"
            );
        }
        assert!(pure.build_imag_max() < 1e-12);
        assert!(mixed.build_imag_max() < 1e-12);
    }

    #[test]
    fn store_canonicalizes_permuted_pattern() {
        let store: TableStore<f64> = TableStore::new();
        let (table, perm) = store.get(PotentialKind::Integral, 1.7, &[0, 1]).unwrap();
        assert_eq!(table.pattern(), &[1, 0]);
        assert_eq!(perm, vec![1, 0]);
        // V_{(0,1)}(0.5, 0.25) through the permutation path.
        let got = store.eval_or_truncate(&table, &perm, &[0.5, 0.25]);
        assert!((got - (-0.037_177_520_900)).abs() < 1e-9, "{got:.14e}");
        // Memoization: same canonical table shared with eps = (1,0).
        let (again, perm2) = store.get(PotentialKind::Integral, 1.7, &[1, 0]).unwrap();
        assert!(Arc::ptr_eq(&table, &again));
        assert_eq!(perm2, vec![0, 1]);
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store: TableStore<f64> = TableStore::with_cache_dir(dir.path().to_path_buf());
        let (t1, _) = store.get(PotentialKind::Integral, 1.25, &[1]).unwrap();
        // A fresh store loads from disk; values agree to write precision.
        let store2: TableStore<f64> = TableStore::with_cache_dir(dir.path().to_path_buf());
        let (t2, _) = store2.get(PotentialKind::Integral, 1.25, &[1]).unwrap();
        for &x in &[0.0, 1.5, -3.25, 0.113] {
            let a = t1.eval(&[x]).unwrap();
            let b = t2.eval(&[x]).unwrap();
            assert!((a - b).abs() < 1e-12, "x={x}");
        }
        assert_eq!(t2.pattern(), &[1]);
        assert!(t2.shell_bound() < 1e-10);
    }

    #[test]
    fn invalid_patterns_rejected() {
        assert!(PotentialTable::<f64>::build(PotentialKind::Integral, 1.25, &[0]).is_err());
        assert!(PotentialTable::<f64>::build(PotentialKind::Integral, 1.25, &[0, 1]).is_err());
        assert!(PotentialTable::<f64>::build(PotentialKind::Integral, -1.0, &[1]).is_err());
        assert!(PotentialTable::<f64>::build(PotentialKind::Integral, 1.7, &[1, 1, 1]).is_err());
    }

    #[test]
    fn decay_envelope_and_zero_mean() {
        let (mixed, pure) = tables_2d();
        for (name, t) in [
            ("1d integral", table_1d_i()),
            ("2d mixed", mixed),
            ("2d pure", pure),
        ] {
            assert!(
                t.decay_p_hat() >= 4.0,
                "{name}: fitted decay exponent {} below 4",
                t.decay_p_hat()
            );
            assert!(t.decay_c4() > 0.0 && t.decay_c4().is_finite(), "{name}");
            assert!(
                t.lattice_sum().abs() < 1e-6,
                "{name}: lattice sum {:e}",
                t.lattice_sum()
            );
        }
        // The envelope bound holds pointwise (spot check off-grid).
        let t = table_1d_i();
        for i in 0..60 {
            let x = -30.0 + i as f64 + 0.377;
            let v = t.eval_centered(&[x]).unwrap();
            let bound = t.decay_c4() / (1.0 + x.abs()).powi(4);
            assert!(v.abs() <= bound * (1.0 + 1e-9), "x={x}: |{v:e}| > {bound:e}");
        }
    }

    #[test]
    fn block_fill_matches_pointwise_eval() {
        let t = table_1d_i();
        let mut out = vec![0.0f64; 48];
        let x_first = 7.3;
        let truncated = t.fill_block1(x_first, 48, &mut out);
        assert_eq!(truncated, 0);
        for (i, &got) in out.iter().enumerate() {
            let want = t.eval(&[x_first - i as f64]).unwrap();
            assert!((got - want).abs() < 1e-13, "i={i}");
        }
        // Block straddling the window edge: inside entries exact, outside
        // entries zeroed and counted.
        let mut edge = vec![0.0f64; 20];
        let start = -500.6; // queries -500.6, -501.6, … cross -510
        let cut = t.fill_block1(start, 20, &mut edge);
        assert!(cut > 0 && cut < 20);
        for (i, &got) in edge.iter().enumerate() {
            let x = start - i as f64;
            match t.eval(&[x]) {
                Some(want) => assert!((got - want).abs() < 1e-13, "i={i}"),
                None => assert_eq!(got, 0.0, "i={i}"),
            }
        }

        let (mixed, pure) = tables_2d();
        let mut block = vec![0.0f64; 7 * 5];
        let first = [3.4, -1.8];
        assert_eq!(pure.fill_block2(first, [7, 5], &mut block), 0);
        for i in 0..7 {
            for j in 0..5 {
                let want = pure.eval(&[first[0] - i as f64, first[1] - j as f64]).unwrap();
                let got = block[i * 5 + j];
                assert!((got - want).abs() < 1e-13, "({i},{j})");
            }
        }
        // Mixed pattern exercises the per-axis half-shift split.
        assert_eq!(mixed.fill_block2(first, [7, 5], &mut block), 0);
        for i in 0..7 {
            for j in 0..5 {
                let want = mixed.eval(&[first[0] - i as f64, first[1] - j as f64]).unwrap();
                let got = block[i * 5 + j];
                assert!((got - want).abs() < 1e-13, "mixed ({i},{j})");
            }
        }
        // Window-edge behaviour in 2-d.
        let mut far = vec![1.0f64; 3 * 3];
        let cut2 = pure.fill_block2([64.5, 0.0], [3, 3], &mut far);
        assert_eq!(cut2, 6); // rows x = 64.5 and x = 63.5 fall outside |x| ≤ 63
        assert!(far[..6].iter().all(|&v| v == 0.0));
        assert!(far[6..].iter().any(|&v| v != 0.0));
        for i in 0..3 {
            for j in 0..3 {
                let q = [64.5 - i as f64, -(j as f64)];
                match pure.eval(&q) {
                    Some(want) => assert!((far[i * 3 + j] - want).abs() < 1e-13),
                    None => assert_eq!(far[i * 3 + j], 0.0),
                }
            }
        }
    }

    #[test]
    fn exact_quadrature_agrees_with_tables() {
        // 1-d, both kinds, against the frozen/table values.
        let v: f64 = potential_exact(PotentialKind::Integral, 1.25, &[1], &[0.0]).unwrap();
        assert!((v - (-0.091_505_350_105_277_851)).abs() < 1e-10, "{v:.17e}");
        let t = table_1d_i();
        for &x in &[1.5, -3.25, 0.113] {
            let want = potential_exact(PotentialKind::Integral, 1.25, &[1], &[x]).unwrap();
            let got = t.eval(&[x]).unwrap();
            assert!((got - want).abs() < 1e-7, "x={x}: {got:e} vs {want:e}");
        }
        // 2-d pure and mixed patterns; the mixed case checks axis order
        // directly (no canonical swap in the exact evaluator).
        let vp: f64 = potential_exact(PotentialKind::Integral, 1.7, &[1, 1], &[0.5, 0.25]).unwrap();
        assert!((vp - 0.004_525_087_868).abs() < 1e-8, "{vp:.14e}");
        let vm: f64 = potential_exact(PotentialKind::Integral, 1.7, &[0, 1], &[0.5, 0.25]).unwrap();
        assert!((vm - (-0.037_177_520_900)).abs() < 1e-8, "{vm:.14e}");
    }
}
