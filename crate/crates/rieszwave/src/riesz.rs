//! Process parameters, the Riesz kernel `k_alpha`, its normalizing constant
//! `gamma_d(alpha)`, and the process kernel `h_t`.
//!
//! The Riesz kernel on `R^d` is
//!
//! ```text
//! k_alpha(x) = ‖x‖^(alpha-d) / gamma_d(alpha)            alpha - d ∉ {0,2,4,6}
//!            = ‖x‖^(alpha-d) ln(1/‖x‖) / gamma_d(alpha)  alpha - d ∈ {0,2,4,6}
//! ```
//!
//! with `gamma_d(alpha)` chosen so that `k_alpha` has Fourier transform
//! `‖ξ‖^(-alpha)`. The process kernel is the difference
//! `h_t(x) = k_{alpha+1}(t* - x) - k_{alpha+1}(x)` with `t* = (t, …, t)`;
//! the order-`d` Wiener-Itô integral of `h_t` is an `H`-self-similar process
//! with stationary increments, where `alpha = H + d/2 - 1`.

use crate::error::{Error, Result};
use crate::gamma::{gamma, is_gamma_pole};
use crate::quad::{geometric_breakpoints, gl_rule};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// Parameters of the order-`d` chaos process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams<T> {
    /// Hurst index `H ∈ (1/2, 1)`: self-similarity order of the process.
    pub hurst: T,
    /// Chaos order `d ≥ 1` (`d = 1` is fractional Brownian motion).
    pub chaos_order: usize,
    /// Derived kernel order `alpha = H + d/2 - 1`.
    pub alpha: T,
    /// Multiplicative normalization applied to the process; equals
    /// `1/sqrt(d! ‖h_1‖²)` when normalization was requested (making
    /// `E[X_1²] = 1`) and `1` otherwise.
    pub variance_norm: T,
    /// Whether `variance_norm` was derived from the kernel norm.
    pub normalized: bool,
}

impl<T: Real> ProcessParams<T> {
    /// Potential order `a = alpha + 1` entering `h_t = k_a(t*-·) - k_a`.
    pub fn potential_order(&self) -> T {
        self.alpha + T::one()
    }

    /// Homogeneity exponent `s = alpha + 1 - d = H - d/2` of the kernel
    /// profile `‖x‖^s`.
    pub fn kernel_exponent(&self) -> T {
        self.hurst - T::from_usize_c(self.chaos_order) / T::from_f64_c(2.0)
    }

    /// `E[X_t²]` of the (possibly normalized) process:
    /// `variance_norm² · d! · ‖h_t‖²`.
    pub fn second_moment(&self, t: T) -> Result<T> {
        let n = kernel_norm(t, self)?;
        Ok(self.variance_norm * self.variance_norm * factorial::<T>(self.chaos_order) * n * n)
    }
}

/// `n!` as a scalar.
pub fn factorial<T: Real>(n: usize) -> T {
    let mut acc = T::one();
    for i in 2..=n {
        acc = acc * T::from_usize_c(i);
    }
    acc
}

/// Validate `(H, d)` and derive `alpha = H + d/2 - 1`; when `normalize` is
/// set, compute `variance_norm = 1/sqrt(d! ‖h_1‖²)` via [`kernel_norm`].
///
/// Rejects `H` outside the open interval `(1/2, 1)` (the theory degenerates
/// at both endpoints) and `d < 1`.
pub fn derive_params<T: Real>(hurst: T, chaos_order: usize, normalize: bool) -> Result<ProcessParams<T>> {
    let half = T::from_f64_c(0.5);
    if !(hurst > half && hurst < T::one()) {
        return Err(Error::invalid(format!(
            "Hurst index must lie in (1/2, 1), got {hurst}"
        )));
    }
    if chaos_order < 1 {
        return Err(Error::invalid("chaos order d must be >= 1"));
    }
    let d_t = T::from_usize_c(chaos_order);
    let alpha = hurst + d_t / T::from_f64_c(2.0) - T::one();
    let mut params = ProcessParams {
        hurst,
        chaos_order,
        alpha,
        variance_norm: T::one(),
        normalized: false,
    };
    // For valid (H, d), alpha is never an integer and the kernel order
    // alpha + 1 stays on the pure power branch (alpha + 1 - d = H - d/2 can
    // never be a non-negative even integer). Checked defensively: a failure
    // here would mean the two validations above let an invalid pair through.
    if alpha.fract() == T::zero() {
        return Err(Error::invalid(format!("derived alpha {alpha} is an integer")));
    }
    if is_power_log_branch(params.potential_order(), chaos_order) {
        return Err(Error::invalid(
            "derived kernel order fell on the logarithmic branch",
        ));
    }
    if normalize {
        let norm1 = kernel_norm(T::one(), &params)?;
        params.variance_norm = (factorial::<T>(chaos_order).sqrt() * norm1).recip();
        params.normalized = true;
    }
    Ok(params)
}

/// Kernel branch: plain power `‖x‖^(alpha-d)` or the logarithmic variant
/// `‖x‖^(alpha-d) ln(1/‖x‖)` used exactly when `alpha - d ∈ {0, 2, 4, 6}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelBranch {
    Power,
    PowerLog,
}

/// Fully resolved Riesz kernel: order, dimension, branch, and the
/// normalizing constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszKernelSpec<T> {
    pub alpha: T,
    pub d: usize,
    pub branch: KernelBranch,
    pub gamma: T,
}

fn is_power_log_branch<T: Real>(alpha: T, d: usize) -> bool {
    let diff = alpha - T::from_usize_c(d);
    [0.0, 2.0, 4.0, 6.0]
        .iter()
        .any(|&e| diff == T::from_f64_c(e))
}

impl<T: Real> RieszKernelSpec<T> {
    /// Resolve branch and constant for a kernel of order `alpha` on `R^d`.
    pub fn new(alpha: T, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::invalid("kernel dimension d must be >= 1"));
        }
        let branch = if is_power_log_branch(alpha, d) {
            KernelBranch::PowerLog
        } else {
            KernelBranch::Power
        };
        let gamma = gamma_constant(alpha, d)?;
        Ok(RieszKernelSpec { alpha, d, branch, gamma })
    }

    /// Kernel value at `x ≠ 0`.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.d {
            return Err(Error::invalid(format!(
                "point dimension {} does not match kernel dimension {}",
                x.len(),
                self.d
            )));
        }
        let r2: T = x.iter().map(|&v| v * v).sum();
        if r2 == T::zero() {
            return Err(Error::Domain("Riesz kernel is singular at the origin".into()));
        }
        Ok(self.eval_radius_sq(r2))
    }

    /// Kernel value as a function of `‖x‖²` (radial profile); `r2 > 0`.
    #[inline]
    pub fn eval_radius_sq(&self, r2: T) -> T {
        let half = T::from_f64_c(0.5);
        let s = self.alpha - T::from_usize_c(self.d);
        let power = r2.powf(s * half);
        match self.branch {
            KernelBranch::Power => power / self.gamma,
            // ln(1/‖x‖) = -ln(‖x‖) = -ln(r²)/2.
            KernelBranch::PowerLog => -power * r2.ln() * half / self.gamma,
        }
    }
}

/// The normalizing constant `gamma_d(alpha)`:
///
/// ```text
/// gamma_d(alpha) = 2^alpha π^(d/2) Γ(alpha/2) / Γ((d-alpha)/2)   generically,
///                = 1                                             alpha = -2k,
///                = (-1)^((d-2)/2) π^(d/2) 2^(alpha-1) ((alpha-d)/2)! Γ(alpha/2)
///                                                                alpha = d+2k,
/// ```
///
/// for `k ∈ N`. The third case carries the sign `(-1)^((d-2)/2)`, which is
/// only defined for even `d`; odd `d` with `alpha - d` a non-negative even
/// integer is rejected (the generic case hits a Γ pole there and no special
/// case applies).
pub fn gamma_constant<T: Real>(alpha: T, d: usize) -> Result<T> {
    let two = T::from_f64_c(2.0);
    let d_t = T::from_usize_c(d);
    let half_d = d_t / two;

    // alpha = -2k, k ∈ N (non-positive even integer).
    let half_alpha = alpha / two;
    if alpha <= T::zero() && half_alpha.fract() == T::zero() {
        return Ok(T::one());
    }

    // alpha = d + 2k, k ∈ N (alpha - d a non-negative even integer).
    let diff = alpha - d_t;
    if diff >= T::zero() && (diff / two).fract() == T::zero() {
        if d % 2 != 0 {
            return Err(Error::Domain(format!(
                "gamma_{d}({alpha}) undefined: generic case has a Γ pole and the \
                 even-alpha special case requires even dimension"
            )));
        }
        let k = (diff / two)
            .to_usize()
            .expect("(alpha-d)/2 is a small non-negative integer");
        let sign = if ((d as i64 - 2) / 2) % 2 == 0 { T::one() } else { -T::one() };
        let pi_pow = T::PI().powf(half_d);
        let two_pow = two.powf(alpha - T::one());
        return Ok(sign * pi_pow * two_pow * factorial::<T>(k) * gamma(half_alpha));
    }

    // Generic case; after the two special cases neither Γ argument can be a
    // pole, but guard against float surprises.
    let refl = (d_t - alpha) / two;
    if is_gamma_pole(half_alpha) || is_gamma_pole(refl) {
        return Err(Error::Domain(format!(
            "gamma_{d}({alpha}): Γ pole in the generic formula"
        )));
    }
    Ok(two.powf(alpha) * T::PI().powf(half_d) * gamma(half_alpha) / gamma(refl))
}

/// The Riesz kernel `k_alpha(x)` on `R^d`; `x ≠ 0`.
pub fn riesz_kernel<T: Real>(x: &[T], alpha: T, d: usize) -> Result<T> {
    RieszKernelSpec::new(alpha, d)?.eval(x)
}

/// The process kernel `h_t(x) = k_{alpha+1}(t* - x) - k_{alpha+1}(x)` with
/// `t* = (t, …, t)`; singular at `x = 0` and `x = t*`.
///
/// Symmetric in the coordinates of `x`, homogeneous of degree `H - d/2`
/// (`h_{ct}(cx) = c^{H-d/2} h_t(x)`), and increment-stationary
/// (`h_{t+ρ}(x) - h_t(x) = h_ρ(x - t*)`).
pub fn kernel_h<T: Real>(t: T, x: &[T], params: &ProcessParams<T>) -> Result<T> {
    if t < T::zero() {
        return Err(Error::invalid("kernel_h requires t >= 0"));
    }
    let d = params.chaos_order;
    if x.len() != d {
        return Err(Error::invalid(format!(
            "point dimension {} does not match chaos order {}",
            x.len(),
            d
        )));
    }
    let spec = RieszKernelSpec::new(params.potential_order(), d)?;
    let mut r0_sq = T::zero();
    let mut rt_sq = T::zero();
    for &xi in x {
        r0_sq += xi * xi;
        let s = t - xi;
        rt_sq += s * s;
    }
    if r0_sq == T::zero() || rt_sq == T::zero() {
        return Err(Error::Domain(
            "kernel h_t is singular at x = 0 and x = t*".into(),
        ));
    }
    Ok(spec.eval_radius_sq(rt_sq) - spec.eval_radius_sq(r0_sq))
}

/// Kernel norm with its quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct KernelNorm<T> {
    /// `‖h_t‖_{L²(R^d)}`.
    pub value: T,
    /// Estimated relative error of the quadrature (rule comparison plus the
    /// analytic far-field remainder bound).
    pub rel_error: T,
}

/// `‖h_t‖_{L²(R^d)}` by graded-mesh Gauss–Legendre quadrature; `t > 0`,
/// `d ≤ 3`.
///
/// The squared norm has integrable singularities at `x = 0` and `x = t*` and
/// a slowly decaying far field `~ ‖x‖^(2H-2-d)`. The mesh grades
/// geometrically into both singular points, extends dyadically until the
/// analytic tail bound is negligible, and adds the closed-form leading tail
/// correction. Relative accuracy target: `1e-6` for `d ≤ 2`, `1e-4` for
/// `d = 3` (in `f64`); failure to meet it reports the achieved estimate.
pub fn kernel_norm<T: Real>(t: T, params: &ProcessParams<T>) -> Result<T> {
    Ok(kernel_norm_detailed(t, params)?.value)
}

/// As [`kernel_norm`], returning the error estimate alongside the value.
pub fn kernel_norm_detailed<T: Real>(t: T, params: &ProcessParams<T>) -> Result<KernelNorm<T>> {
    if t <= T::zero() {
        return Err(Error::invalid("kernel_norm requires t > 0"));
    }
    let d = params.chaos_order;
    if d > 3 {
        return Err(Error::invalid(
            "kernel_norm supports chaos order d <= 3 (quadrature over R^d)",
        ));
    }
    let target_rel = if d <= 2 { 1e-6 } else { 1e-4 };
    let spec = RieszKernelSpec::new(params.potential_order(), d)?;
    let (coarse, fine, tail_rel) = match d {
        1 => norm_sq_1d(t, &spec),
        _ => norm_sq_axial(t, &spec, d),
    };
    let norm_sq = fine;
    if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
        return Err(Error::Accuracy {
            target: target_rel,
            achieved: f64::INFINITY,
            context: format!("kernel_norm quadrature degenerate for t={t}, d={d}"),
        });
    }
    // Floor the estimate at the empirically validated mesh accuracy (rule
    // comparison alone can be optimistic when both rules have converged to
    // the same mesh-limited value).
    let floor = T::from_f64_c(if d <= 2 { 1e-9 } else { 1e-6 });
    let rule_rel = ((fine - coarse) / fine).abs().max(floor);
    let rel = rule_rel + tail_rel;
    // Norm error is half the squared-norm error in relative terms.
    let rel_value = rel * T::from_f64_c(0.5);
    if rel_value.to_f64().unwrap_or(f64::INFINITY) > target_rel {
        return Err(Error::Accuracy {
            target: target_rel,
            achieved: rel_value.to_f64().unwrap_or(f64::INFINITY),
            context: format!("kernel_norm quadrature for t={t}, d={d}"),
        });
    }
    Ok(KernelNorm {
        value: norm_sq.sqrt(),
        rel_error: rel_value,
    })
}

/// Difference profile `(k_a(r_t) - k_a(r_0))²` as a function of the two
/// squared radii.
#[inline]
fn diff_sq<T: Real>(spec: &RieszKernelSpec<T>, r0_sq: T, rt_sq: T) -> T {
    let v = spec.eval_radius_sq(rt_sq) - spec.eval_radius_sq(r0_sq);
    v * v
}

/// Sorted breakpoints grading geometrically into the cusps `0` and `c > 0`
/// and dyadically outward to `±extent`; deepest panel scale `c · 1e-13`.
fn cusp_mesh<T: Real>(c: T, extent: T) -> Vec<T> {
    let eps = c * T::from_f64_c(1e-13);
    let mut pts: Vec<T> = Vec::new();
    // Left of 0: -extent … -eps (dyadic toward the cusp), then 0 itself.
    for &p in geometric_breakpoints(eps, extent, 2.0).iter().rev() {
        pts.push(-p);
    }
    pts.push(T::zero());
    // (0, c): grade away from 0 up to c/2, then into c from the left.
    let half_c = c * T::from_f64_c(0.5);
    for &p in geometric_breakpoints(eps, half_c, 2.0).iter() {
        pts.push(p);
    }
    for &p in geometric_breakpoints(eps, half_c, 2.0).iter().rev() {
        if c - p > *pts.last().unwrap() {
            pts.push(c - p);
        }
    }
    pts.push(c);
    // Right of c: grade away dyadically to extent.
    for &p in geometric_breakpoints(eps, extent, 2.0).iter() {
        pts.push(c + p);
    }
    pts
}

/// `d = 1`: `∫ (k_a(t-x) - k_a(x))² dx` over the graded mesh, with the
/// closed-form tail `t² s² A^(2s-1) / ((1-2s) γ²)` beyond each end.
///
/// Returns (coarse-rule value, fine-rule value, relative tail bound).
fn norm_sq_1d<T: Real>(t: T, spec: &RieszKernelSpec<T>) -> (T, T, T) {
    let s = spec.alpha - T::one();
    // Extent: far enough that the post-correction residual is negligible;
    // tail mass ~ A^(2s-1) with 2s-1 = 2H-2 ∈ (-1, 0).
    let extent = extent_for_tail(t, (2.0 * s.to_f64().unwrap() - 1.0) / 2.0);
    let mesh = cusp_mesh(t, extent);
    let f = |x: T| {
        let dtx = t - x;
        diff_sq(spec, x * x, dtx * dtx)
    };
    let coarse = panels_value(&f, &mesh, 8);
    let fine = panels_value(&f, &mesh, 16);
    // Leading far-field term, integrated exactly over both rays |x| > A.
    let one = T::one();
    let two = T::from_f64_c(2.0);
    let a_pow = extent.powf(two * s - one);
    let tail = two * t * t * s * s * a_pow / ((one - two * s) * spec.gamma * spec.gamma);
    let fine_c = fine + tail;
    let coarse_c = coarse + tail;
    // Conservative: count the whole correction as uncertainty (its own
    // residual is down by another factor O(t/A)).
    let tail_rel = (tail / fine_c).abs();
    (coarse_c, fine_c, tail_rel)
}

/// `d ∈ {2, 3}`: reduce to the axial half-plane. Writing `u` for the
/// coordinate along the diagonal `t*/‖t*‖` and `ρ` for the transverse radius,
///
/// ```text
/// ∫_{R^d} f = c_d ∫_0^∞ ∫_{-∞}^∞ f(u, ρ) ρ^(d-2) du dρ,
/// c_2 = 2, c_3 = 2π,
/// ```
///
/// with `r_0² = u² + ρ²` and `r_t² = (T-u)² + ρ²`, `T = t√d`.
fn norm_sq_axial<T: Real>(t: T, spec: &RieszKernelSpec<T>, d: usize) -> (T, T, T) {
    let d_t = T::from_usize_c(d);
    let big_t = t * d_t.sqrt();
    let s = spec.alpha - d_t;
    let s_f = s.to_f64().unwrap();
    // Tail exponent of the radial mass: 2s + d - 2 = 2H - 2.
    let extent = extent_for_tail(big_t, (2.0 * s_f + d as f64 - 2.0) / 2.0);
    let u_mesh = cusp_mesh(big_t, extent);
    let rho_mesh = rho_mesh(big_t, extent);
    let c_d = if d == 2 {
        T::from_f64_c(2.0)
    } else {
        T::from_f64_c(2.0) * T::PI()
    };
    let f = move |u: T, rho: T| {
        let r0_sq = u * u + rho * rho;
        let du = big_t - u;
        let rt_sq = du * du + rho * rho;
        let w = if d == 2 { T::one() } else { rho };
        diff_sq(spec, r0_sq, rt_sq) * w
    };
    let coarse = tensor_value(&f, &u_mesh, &rho_mesh, 8) * c_d;
    let fine = tensor_value(&f, &u_mesh, &rho_mesh, 16) * c_d;
    // Spherical tail beyond ‖x‖ = A (leading far-field term):
    // s² t² σ_(d-1) A^(2s+d-2) / ((2-2s-d) γ²), σ_1 = 2π, σ_2 = 4π.
    let sigma = if d == 2 {
        T::from_f64_c(2.0) * T::PI()
    } else {
        T::from_f64_c(4.0) * T::PI()
    };
    let two = T::from_f64_c(2.0);
    let expo = two * s + d_t - two;
    let tail = s * s * t * t * sigma * extent.powf(expo) / ((two - two * s - d_t) * spec.gamma * spec.gamma);
    // The mesh covers a rectangle rather than the disk of radius A, so part
    // of the corrected tail is also integrated numerically; the extent is
    // chosen to make the whole correction ~1e-9 relative, and it is counted
    // as uncertainty wholesale.
    let fine_c = fine + tail;
    let coarse_c = coarse + tail;
    let tail_rel = (tail / fine_c).abs();
    (coarse_c, fine_c, tail_rel)
}

/// Transverse mesh: geometric from scale `c·1e-13` to `c`, dyadic to extent.
fn rho_mesh<T: Real>(c: T, extent: T) -> Vec<T> {
    let eps = c * T::from_f64_c(1e-13);
    let mut pts = vec![T::zero()];
    pts.extend_from_slice(&geometric_breakpoints(eps, extent, 2.0));
    pts
}

/// Pick the mesh extent so the raw tail mass `~ A^(2·expo)` is at most
/// `~1e-9` relative (then the closed-form correction drives the residual far
/// below any target); `expo = H - 1 < 0` in all uses.
fn extent_for_tail<T: Real>(scale: T, expo: f64) -> T {
    debug_assert!(expo < 0.0);
    // A^(2 expo) = 1e-9  =>  log2 A = -9 ln10 / (2 expo ln 2).
    let log2_a = (-9.0 * std::f64::consts::LN_10 / (2.0 * expo * std::f64::consts::LN_2))
        .ceil()
        .clamp(8.0, 60.0);
    scale.max(T::one()) * T::from_f64_c(log2_a.exp2())
}

fn panels_value<T: Real, F: Fn(T) -> T>(f: &F, mesh: &[T], n: usize) -> T {
    let rule = gl_rule(n);
    let half = T::from_f64_c(0.5);
    let mut acc = T::zero();
    for w in mesh.windows(2) {
        let mid = (w[0] + w[1]) * half;
        let rad = (w[1] - w[0]) * half;
        let mut p = T::zero();
        for (&x, &wt) in rule.0.iter().zip(rule.1.iter()) {
            p += T::from_f64_c(wt) * f(mid + rad * T::from_f64_c(x));
        }
        acc += p * rad;
    }
    acc
}

fn tensor_value<T: Real, F: Fn(T, T) -> T>(f: &F, u_mesh: &[T], rho_mesh: &[T], n: usize) -> T {
    let rule = gl_rule(n);
    let half = T::from_f64_c(0.5);
    let nodes: Vec<T> = rule.0.iter().map(|&x| T::from_f64_c(x)).collect();
    let weights: Vec<T> = rule.1.iter().map(|&w| T::from_f64_c(w)).collect();
    let mut acc = T::zero();
    for wu in u_mesh.windows(2) {
        let mu = (wu[0] + wu[1]) * half;
        let ru = (wu[1] - wu[0]) * half;
        for wr in rho_mesh.windows(2) {
            let mr = (wr[0] + wr[1]) * half;
            let rr = (wr[1] - wr[0]) * half;
            let mut p = T::zero();
            for (iu, &xu) in nodes.iter().enumerate() {
                let u = mu + ru * xu;
                let mut row = T::zero();
                for (ir, &xr) in nodes.iter().enumerate() {
                    row += weights[ir] * f(u, mr + rr * xr);
                }
                p += weights[iu] * row;
            }
            acc += p * ru * rr;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

    #[test]
    fn derive_params_examples() {
        let p = derive_params(0.75f64, 1, false).unwrap();
        assert!((p.alpha - 0.25).abs() < 1e-15);
        let p = derive_params(0.7f64, 2, false).unwrap();
        assert!((p.alpha - 0.7).abs() < 1e-15);
        assert!(derive_params(0.5f64, 2, false).is_err());
        assert!(derive_params(1.0f64, 1, false).is_err());
        assert!(derive_params(0.7f64, 0, false).is_err());
    }

    #[test]
    fn gamma_constant_symmetry_point() {
        // d=1, alpha=1/2: Γ(1/4)/Γ(1/4) = 1, so the constant is √(2π).
        let g: f64 = gamma_constant(0.5, 1).unwrap();
        assert!((g - SQRT_2PI).abs() < 1e-13, "{g}");
    }

    #[test]
    fn gamma_constant_special_cases() {
        // alpha = -2k ↦ 1.
        assert_eq!(gamma_constant(-2.0f64, 1).unwrap(), 1.0);
        assert_eq!(gamma_constant(0.0f64, 3).unwrap(), 1.0);
        assert_eq!(gamma_constant(-4.0f64, 2).unwrap(), 1.0);
        // alpha = d + 2k with even d: sign (-1)^((d-2)/2) π^(d/2) 2^(alpha-1) k! Γ(alpha/2).
        // d=2, alpha=2 (k=0): 1 · π · 2 · 1 · Γ(1) = 2π.
        let g: f64 = gamma_constant(2.0, 2).unwrap();
        assert!((g - 2.0 * std::f64::consts::PI).abs() < 1e-12, "{g}");
        // d=2, alpha=4 (k=1): π · 8 · 1 · Γ(2) = 8π.
        let g: f64 = gamma_constant(4.0, 2).unwrap();
        assert!((g - 8.0 * std::f64::consts::PI).abs() < 1e-11, "{g}");
        // Odd d on the even-offset line: undefined.
        assert!(gamma_constant(1.0f64, 1).is_err());
        assert!(gamma_constant(5.0f64, 3).is_err());
    }

    #[test]
    fn gamma_constant_high_precision_oracle() {
        // 40-digit evaluations of the generic formula.
        let cases: [(f64, usize, f64); 6] = [
            (0.7, 2, 9.383_585_612_803_109_9),
            (1.1, 1, -0.297_648_097_499_472_19),
            (1.25, 1, -0.693_730_422_047_618_99),
            (1.7, 2, 1.825_513_711_292_608_4),
            (2.3, 3, 10.048_726_481_778_888),
            (1.6, 2, 2.415_149_598_451_025_0),
        ];
        for (alpha, d, expected) in cases {
            let g: f64 = gamma_constant(alpha, d).unwrap();
            let rel = ((g - expected) / expected).abs();
            assert!(rel < 1e-12, "gamma_{d}({alpha}) = {g:.17e}, want {expected:.17e}");
        }
    }

    #[test]
    fn riesz_kernel_basics() {
        // ‖x‖ = 1 on the power branch: 1/γ.
        let g: f64 = gamma_constant(1.25, 1).unwrap();
        let v = riesz_kernel(&[1.0f64], 1.25, 1).unwrap();
        assert!((v - 1.0 / g).abs() < 1e-14);
        // ‖x‖ = 1 on the log branch: ln 1 = 0.
        let v = riesz_kernel(&[0.6f64, 0.8], 4.0, 2).unwrap();
        assert_eq!(v, 0.0);
        // Homogeneity k(cx) = c^(alpha-d) k(x) on the power branch.
        let x = [0.3f64, -0.4];
        let c = 1.7f64;
        let alpha = 1.7;
        let v1 = riesz_kernel(&[x[0] * c, x[1] * c], alpha, 2).unwrap();
        let v0 = riesz_kernel(&x, alpha, 2).unwrap();
        assert!((v1 - c.powf(alpha - 2.0) * v0).abs() < 1e-14 * v0.abs());
        // Origin rejected.
        assert!(riesz_kernel(&[0.0f64], 1.25, 1).is_err());
    }

    #[test]
    fn kernel_h_examples() {
        let p = derive_params(0.75f64, 1, false).unwrap();
        // t=0: the two kernel terms coincide.
        assert_eq!(kernel_h(0.0, &[0.3], &p).unwrap(), 0.0);
        // Permutation symmetry in the coordinates.
        let p2 = derive_params(0.7f64, 2, false).unwrap();
        let a = kernel_h(0.5, &[0.2, -0.7], &p2).unwrap();
        let b = kernel_h(0.5, &[-0.7, 0.2], &p2).unwrap();
        assert_eq!(a, b);
        // Singular points rejected.
        assert!(kernel_h(0.5, &[0.0, 0.0], &p2).is_err());
        assert!(kernel_h(0.5, &[0.5, 0.5], &p2).is_err());
    }

    #[test]
    fn kernel_h_homogeneity_and_stationarity() {
        let p = derive_params(0.7f64, 2, false).unwrap();
        let expo = p.kernel_exponent();
        let (t, c) = (0.37, 2.3);
        let x = [0.51, -0.22];
        let lhs = kernel_h(c * t, &[c * x[0], c * x[1]], &p).unwrap();
        let rhs = c.powf(expo) * kernel_h(t, &x, &p).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        // h_{t+ρ}(x) - h_t(x) = h_ρ(x - t*).
        let (t, rho) = (0.4, 0.35);
        let lhs = kernel_h(t + rho, &x, &p).unwrap() - kernel_h(t, &x, &p).unwrap();
        let rhs = kernel_h(rho, &[x[0] - t, x[1] - t], &p).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn kernel_norm_d1_oracle() {
        // ‖h_1‖² for d=1 has the closed spectral form
        // (2/π) (-Γ(-2H)) cos(πH); 40-digit values frozen below.
        for (h, norm_sq) in [
            (0.6f64, 0.954_310_988_531_844_47),
            (0.7, 0.995_088_135_903_925_01),
            (0.75, 1.063_846_081_070_487_1),
        ] {
            let p = derive_params(h, 1, false).unwrap();
            let n = kernel_norm(1.0, &p).unwrap();
            let rel = (n * n / norm_sq - 1.0).abs();
            assert!(rel < 1e-6, "H={h}: ‖h‖² = {:.12e}, want {norm_sq:.12e}", n * n);
        }
    }

    #[test]
    fn kernel_norm_scales_as_t_pow_h() {
        let p = derive_params(0.7f64, 1, false).unwrap();
        let n1 = kernel_norm(1.0, &p).unwrap();
        let nt = kernel_norm(0.3, &p).unwrap();
        let rel = (nt / (0.3f64.powf(0.7) * n1) - 1.0).abs();
        assert!(rel < 3e-6, "rel {rel:.2e}");
        // t → 0⁺: norm → 0.
        let small = kernel_norm(1e-3, &p).unwrap();
        assert!(small < 0.01);
    }

    #[test]
    fn normalization_makes_unit_variance() {
        let p = derive_params(0.75f64, 1, true).unwrap();
        let n1 = kernel_norm(1.0, &p).unwrap();
        let second = p.variance_norm * p.variance_norm * factorial::<f64>(1) * n1 * n1;
        assert!((second - 1.0).abs() < 1e-9);
    }
}
