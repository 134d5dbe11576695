//! Multiple Wiener–Itô integrals of tensor basis elements and their exact
//! joint law.
//!
//! For a tensor element `ψ^(eps)_{j,k} = ⊗_i f_i` built from orthonormal 1-d
//! atoms `f_i ∈ {φ_{j,k_i}, ψ_{j,k_i}}`, the order-`d` integral factorizes
//! into probabilists' Hermite polynomials of the underlying Gaussian
//! coordinates:
//!
//! ```text
//! I_d(⊗_i f_i) = Π_{f distinct} H_{m_f}(ξ_f),   ξ_f = I_1(f) ~ N(0,1) iid,
//! ```
//!
//! with `m_f` the multiplicity of `f` among the factors. The coordinates
//! `ξ` at different levels are *not* independent — they are tied by the
//! two-scale relations of the multiresolution. Writing `a(j,k) = I_1(φ_{j,k})`
//! and `b(j,k) = I_1(ψ_{j,k})`, the exact joint law is generated in the
//! synthesis direction:
//!
//! ```text
//! a(j_min, ·) iid N(0,1),   b(j, ·) iid N(0,1) for every level,
//! a(j+1, n) = Σ_k h_{n-2k} a(j,k) + Σ_k g_{n-2k} b(j,k),
//! ```
//!
//! which reproduces the analysis-direction identities
//! `a(j,k) = Σ_n h_{n-2k} a(j+1,n)` and `b(j,k) = Σ_n g_{n-2k} a(j+1,n)` up
//! to the filter truncation energy. All root and detail draws are
//! coordinate-keyed ([`crate::rng`]), so a realization is a deterministic
//! function of the master seed alone.
//!
//! Covariances are exact: chaos values at different levels are uncorrelated
//! (tensor elements span mutually orthogonal detail spaces), and at equal
//! levels `E[I_d(u) I_d(v)]` is the permanent of the atom Gram matrix, which
//! reduces to counting multiset matchings.

use crate::error::{Error, Result};
use crate::meyer::{AtomKind, FilterPair, WaveletIndex};
use crate::real::Real;
use crate::rng::{normal_at, StreamTag};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Probabilists' Hermite polynomial `H_n` (monic):
/// `H_0 = 1, H_1 = x, H_{n+1} = x H_n - n H_{n-1}`.
pub fn hermite_prob<T: Real>(n: u32, x: T) -> T {
    match n {
        0 => T::one(),
        1 => x,
        _ => {
            let mut prev = T::one();
            let mut cur = x;
            for m in 1..n {
                let next = x * cur - T::from_usize_c(m as usize) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Inclusive integer window `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub min: i64,
    pub max: i64,
}

impl Window {
    /// Validated constructor.
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::invalid(format!("empty window [{min}, {max}]")));
        }
        Ok(Window { min, max })
    }

    /// Number of integers covered.
    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    /// Windows are never empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Membership test.
    pub fn contains(&self, k: i64) -> bool {
        self.min <= k && k <= self.max
    }

    /// Smallest window covering both.
    pub fn hull(&self, other: Window) -> Window {
        Window {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    fn hull_opt(a: Option<Window>, b: Option<Window>) -> Option<Window> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.hull(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Per-level coordinate demand handed to the sampler.
#[derive(Debug, Clone, Copy)]
pub struct LevelRequest {
    /// Dyadic level.
    pub j: i32,
    /// Scaling coordinates `a(j, ·)` wanted.
    pub a: Option<Window>,
    /// Detail coordinates `b(j, ·)` wanted.
    pub b: Option<Window>,
}

#[derive(Debug, Clone, Default)]
struct LevelData<T> {
    a_win: Option<Window>,
    a: Vec<T>,
    b_win: Option<Window>,
    b: Vec<T>,
}

/// One realization of the Gaussian coordinate field over nested windows.
#[derive(Debug, Clone)]
pub struct CascadeField<T> {
    j_min: i32,
    levels: Vec<LevelData<T>>,
}

impl<T: Real> CascadeField<T> {
    /// Coarsest level held.
    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    /// Finest level held.
    pub fn j_max(&self) -> i32 {
        self.j_min + self.levels.len() as i32 - 1
    }

    fn level(&self, j: i32) -> Option<&LevelData<T>> {
        let l = j.checked_sub(self.j_min)?;
        if l < 0 {
            return None;
        }
        self.levels.get(l as usize)
    }

    /// Scaling coordinate `a(j, k) = I_1(φ_{j,k})`.
    pub fn a(&self, j: i32, k: i64) -> Result<T> {
        self.level(j)
            .and_then(|lv| {
                let w = lv.a_win?;
                if w.contains(k) {
                    Some(lv.a[(k - w.min) as usize])
                } else {
                    None
                }
            })
            .ok_or(Error::MissingAtom { j, k, kind: "a" })
    }

    /// Detail coordinate `b(j, k) = I_1(ψ_{j,k})`.
    pub fn b(&self, j: i32, k: i64) -> Result<T> {
        self.level(j)
            .and_then(|lv| {
                let w = lv.b_win?;
                if w.contains(k) {
                    Some(lv.b[(k - w.min) as usize])
                } else {
                    None
                }
            })
            .ok_or(Error::MissingAtom { j, k, kind: "b" })
    }

    /// Contiguous slice of detail coordinates with its window, if held.
    pub fn b_slice(&self, j: i32) -> Option<(Window, &[T])> {
        let lv = self.level(j)?;
        Some((lv.b_win?, &lv.b))
    }

    /// Contiguous slice of scaling coordinates with its window, if held.
    pub fn a_slice(&self, j: i32) -> Option<(Window, &[T])> {
        let lv = self.level(j)?;
        Some((lv.a_win?, &lv.a))
    }
}

/// Samples [`CascadeField`] realizations with the exact joint law.
#[derive(Debug, Clone)]
pub struct CascadeSampler<T> {
    filters: Arc<FilterPair<T>>,
    seed: u64,
}

impl<T: Real> CascadeSampler<T> {
    /// Sampler drawing from the given master seed.
    pub fn new(filters: Arc<FilterPair<T>>, seed: u64) -> Self {
        CascadeSampler { filters, seed }
    }

    /// The filter pair in use.
    pub fn filters(&self) -> &FilterPair<T> {
        &self.filters
    }

    /// Master seed.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Realize all requested coordinates, rooting the recursion at `j_min`.
    ///
    /// Values are independent of the request shapes: enlarging a window or
    /// adding levels never changes coordinates that were already obtainable
    /// (draws are coordinate-keyed and recursion sums run over full filter
    /// support).
    pub fn sample(&self, j_min: i32, requests: &[LevelRequest]) -> Result<CascadeField<T>> {
        if requests.is_empty() {
            return Err(Error::invalid("no cascade coordinates requested"));
        }
        let j_max = requests.iter().map(|r| r.j).max().unwrap();
        if requests.iter().any(|r| r.j < j_min) {
            return Err(Error::invalid("request below the cascade root level"));
        }
        let n_levels = (j_max - j_min + 1) as usize;
        let mut need_a: Vec<Option<Window>> = vec![None; n_levels];
        let mut need_b: Vec<Option<Window>> = vec![None; n_levels];
        for r in requests {
            let l = (r.j - j_min) as usize;
            need_a[l] = Window::hull_opt(need_a[l], r.a);
            need_b[l] = Window::hull_opt(need_b[l], r.b);
        }
        // Downward pass: computing a(j+1) on [n0, n1] consumes
        // a(j, k), 2k ∈ [n - L, n + L] and b(j, k), 2k ∈ [n + 1 - L, n + 1 + L].
        let big_l = self.filters.half_len;
        for l in (0..n_levels - 1).rev() {
            if let Some(up) = need_a[l + 1] {
                let a_dep = Window {
                    min: (up.min - big_l).div_euclid(2),
                    max: (up.max + big_l + 1).div_euclid(2),
                };
                let b_dep = Window {
                    min: (up.min + 1 - big_l).div_euclid(2),
                    max: (up.max + 2 + big_l).div_euclid(2),
                };
                need_a[l] = Window::hull_opt(need_a[l], Some(a_dep));
                need_b[l] = Window::hull_opt(need_b[l], Some(b_dep));
            }
        }
        if n_levels > 1 || need_a[0].is_some() {
            // The root must be drawable: a(j) for j > j_min requires the
            // chain of levels down to the root, which the downward pass has
            // populated whenever something above needs it.
            for l in 1..n_levels {
                if need_a[l].is_some() && need_a[l - 1].is_none() {
                    return Err(Error::invalid(
                        "internal window propagation failed: missing parent level",
                    ));
                }
            }
        }
        // Upward pass.
        let mut levels: Vec<LevelData<T>> = vec![LevelData::default(); n_levels];
        for l in 0..n_levels {
            let j = j_min + l as i32;
            if let Some(w) = need_b[l] {
                let vals = (w.min..=w.max)
                    .map(|k| normal_at(self.seed, StreamTag::CascadeDetail, j, &[k]))
                    .collect();
                levels[l].b_win = Some(w);
                levels[l].b = vals;
            }
            if let Some(w) = need_a[l] {
                let vals = if l == 0 {
                    (w.min..=w.max)
                        .map(|k| normal_at(self.seed, StreamTag::CascadeRoot, j, &[k]))
                        .collect()
                } else {
                    let below = l - 1;
                    let (aw, av) = (
                        need_a[below].expect("parent window exists"),
                        &levels[below].a,
                    );
                    let (bw, bv) = (
                        need_b[below].expect("parent window exists"),
                        &levels[below].b,
                    );
                    (w.min..=w.max)
                        .map(|n| {
                            self.refine_one(n, aw, av, bw, bv)
                        })
                        .collect::<Result<Vec<T>>>()?
                };
                levels[l].a_win = Some(w);
                levels[l].a = vals;
            }
        }
        Ok(CascadeField { j_min, levels })
    }

    /// `a(j+1, n)` from level-`j` coordinates, summing over the full filter
    /// support in ascending `k` (canonical order for bitwise determinism).
    fn refine_one(
        &self,
        n: i64,
        aw: Window,
        av: &[T],
        bw: Window,
        bv: &[T],
    ) -> Result<T> {
        let big_l = self.filters.half_len;
        let h = &self.filters.h;
        let g = &self.filters.g;
        let mut acc = T::zero();
        let k_lo = (n - big_l).div_euclid(2) + ((n - big_l).rem_euclid(2) != 0) as i64;
        let k_hi = (n + big_l).div_euclid(2);
        for k in k_lo..=k_hi {
            if !aw.contains(k) {
                return Err(Error::MissingAtom { j: 0, k, kind: "a (refinement)" });
            }
            acc += h.at(n - 2 * k) * av[(k - aw.min) as usize];
        }
        let k_lo = (n + 1 - big_l).div_euclid(2) + ((n + 1 - big_l).rem_euclid(2) != 0) as i64;
        let k_hi = (n + 1 + big_l).div_euclid(2);
        for k in k_lo..=k_hi {
            if !bw.contains(k) {
                return Err(Error::MissingAtom { j: 0, k, kind: "b (refinement)" });
            }
            acc += g.at(n - 2 * k) * bv[(k - bw.min) as usize];
        }
        Ok(acc)
    }
}

/// Group the 1-d atoms of a tensor index by multiplicity.
fn atom_multiset(idx: &WaveletIndex) -> BTreeMap<(u8, i64), u32> {
    let mut m = BTreeMap::new();
    for i in 0..idx.d() {
        *m.entry((idx.eps[i], idx.k[i])).or_insert(0u32) += 1;
    }
    m
}

/// Evaluate the chaos value `I_d(ψ^(eps)_{j,k})` on a realized field.
pub fn chaos_value<T: Real>(field: &CascadeField<T>, idx: &WaveletIndex) -> Result<T> {
    let mut acc = T::one();
    for ((eps, k), mult) in atom_multiset(idx) {
        let coord = if eps == 0 {
            field.a(idx.j, k)?
        } else {
            field.b(idx.j, k)?
        };
        acc *= hermite_prob(mult, coord);
    }
    Ok(acc)
}

/// Exact covariance `E[I_d(ψ_u) I_d(ψ_v)]` of two chaos values.
///
/// Zero across levels (orthogonal detail spaces); at equal levels it counts
/// the bijections matching the two atom multisets: `Π_atoms m!` when the
/// multisets agree, zero otherwise.
pub fn chaos_cov<T: Real>(u: &WaveletIndex, v: &WaveletIndex) -> Result<T> {
    if u.d() != v.d() {
        return Err(Error::invalid("covariance of chaos values of unequal order"));
    }
    if u.j != v.j {
        return Ok(T::zero());
    }
    let mu = atom_multiset(u);
    let mv = atom_multiset(v);
    if mu != mv {
        return Ok(T::zero());
    }
    let mut acc = T::one();
    for &mult in mu.values() {
        for f in 2..=mult as usize {
            acc *= T::from_usize_c(f);
        }
    }
    Ok(acc)
}

/// Quadrature cross-check of [`chaos_cov`]: the permanent of the 1-d atom
/// Gram matrix `M_{il} = ⟨f_i, g_l⟩`, each entry via spectral quadrature.
///
/// Exposed for validation; `chaos_cov` itself uses the exact combinatorial
/// form.
pub fn chaos_cov_quadrature<T: Real>(u: &WaveletIndex, v: &WaveletIndex) -> Result<T> {
    if u.d() != v.d() {
        return Err(Error::invalid("covariance of chaos values of unequal order"));
    }
    let d = u.d();
    let kind = |e: u8| if e == 0 { AtomKind::Scaling } else { AtomKind::Wavelet };
    let mut gram = vec![T::zero(); d * d];
    for i in 0..d {
        for l in 0..d {
            gram[i * d + l] = crate::meyer::atom_inner(
                kind(u.eps[i]),
                u.j,
                u.k[i],
                kind(v.eps[l]),
                v.j,
                v.k[l],
            );
        }
    }
    Ok(permanent(&gram, d))
}

/// Permanent by Laplace-style expansion over a column mask (fine for the
/// small orders used here).
fn permanent<T: Real>(m: &[T], d: usize) -> T {
    fn rec<T: Real>(m: &[T], d: usize, row: usize, used: u32) -> T {
        if row == d {
            return T::one();
        }
        let mut acc = T::zero();
        for col in 0..d {
            if used & (1 << col) == 0 {
                let entry = m[row * d + col];
                if entry != T::zero() {
                    acc += entry * rec(m, d, row + 1, used | (1 << col));
                }
            }
        }
        acc
    }
    rec(m, d, 0, 0)
}
