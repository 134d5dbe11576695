//! Pointwise Hölder exponents, uniform modulus of continuity, and growth at
//! infinity.
//!
//! # Pointwise exponent
//!
//! The pointwise Hölder exponent at `t` is the supremum of all `γ` such that
//! `|X_s - X_t| = O(|s - t|^γ)` as `s → t`.  No estimator can take that
//! limsup literally on a finite grid; the stated proxy is an
//! oscillation regression.  For dyadic window levels `m` in a fixed range,
//! the local oscillation
//!
//! ```text
//! osc(t, 2^-m) = max{X_s} - min{X_s}  over grid s ∈ [t - 2^-m, t + 2^-m]
//! ```
//!
//! scales like `2^{-mγ}` for a path that is exactly `γ`-Hölder at `t`, so
//! the least-squares slope of `log₂ osc` against `-m` estimates `γ`.
//! Windows are clamped to the sampled range, which keeps the estimator
//! defined at the endpoints (there it sees the one-sided oscillation).
//! Estimates are clamped to `(0, 1]`: the processes under study are nowhere
//! differentiable, and smoother inputs (a C¹ ramp) legitimately saturate
//! at 1.
//!
//! # Uniform modulus
//!
//! The increments obey, uniformly on the time square, a bound of the form
//!
//! ```text
//! |X_t - X_s| ≤ A(ω) · |t-s|^H · (log(b + |t-s|^{-1}))^{d/2}
//! ```
//!
//! with `d` the chaos order.  [`modulus_statistic_with_exponent`] computes
//! the grid supremum of the ratio for an arbitrary exponent on the log
//! factor; the supremum is stable under grid refinement exactly when the
//! exponent is at least `d/2`, while the plain Hölder ratio (exponent `0`)
//! keeps growing as finer pairs are examined.  [`modulus_stability`] makes
//! the comparison: it evaluates the statistic on the full grid and on a
//! `factor`-fold subsample and flags stability when the ratio of the two
//! suprema stays below 5/4.
//!
//! # Growth at infinity
//!
//! On `[0, T]` the path obeys `|X_t| ≤ B(ω) (1+|t|)^H (log log(c+|t|))^{d/2}`;
//! [`growth_statistic`] reports the grid supremum of that ratio, which should
//! stabilize as `T` doubles.

use crate::error::{Error, Result};
use serde::Serialize;
use crate::real::Real;
use crate::synth::PathSample;

/// Default dyadic window range for the oscillation regression.
pub const DEFAULT_WINDOW_LEVELS: (u32, u32) = (4, 10);

/// Stability threshold for the two-resolution modulus comparison.
const STABILITY_RATIO: f64 = 1.25;

/// Number of interior estimation points used by [`holder_estimate`].
const N_ESTIMATION_POINTS: usize = 50;

/// Regression bookkeeping for the oscillation fits.
#[derive(Debug, Clone, Serialize)]
pub struct FitDiagnostics<T> {
    /// Coarsest dyadic window level used (`2^-m_lo` is the widest window).
    pub m_lo: u32,
    /// Finest dyadic window level used.
    pub m_hi: u32,
    /// Coefficient of determination of each per-`t` regression, aligned
    /// with `pointwise_exponents`.
    pub r_squared: Vec<T>,
}

/// Pointwise-regularity summary of one sample path.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport<T> {
    /// `(t, γ̂(t))` for each interior estimation point, `γ̂ ∈ (0, 1]`.
    pub pointwise_exponents: Vec<(T, T)>,
    /// Median of the pointwise estimates.
    pub global_exponent: T,
    /// Grid supremum of the log-corrected increment ratio (`b = 2`,
    /// log-exponent `d/2`).
    pub modulus_sup: T,
    /// Whether the modulus supremum is stable under two-fold subsampling.
    pub modulus_stable: bool,
    /// Windows and goodness-of-fit of the oscillation regressions.
    pub fit_diagnostics: FitDiagnostics<T>,
}

/// Oscillation-regression estimate of the pointwise Hölder exponent at grid
/// index `center`.
///
/// Returns `(γ̂, R²)` with `γ̂` clamped to `(0, 1]`.  Window levels `m` run
/// over `levels.0 ..= levels.1`; windows narrower than one grid step and
/// levels with zero oscillation are skipped.  Fails when fewer than three
/// levels remain (degenerate input) or when the fitted slope is
/// non-positive.
pub fn pointwise_exponent<T: Real>(
    times: &[T],
    values: &[T],
    center: usize,
    levels: (u32, u32),
) -> Result<(T, T)> {
    validate_series(times, values)?;
    validate_levels(levels)?;
    if center >= values.len() {
        return Err(Error::invalid("estimation point outside the grid"));
    }
    let h = step(times);
    let n = values.len() - 1;
    let mut xs: Vec<T> = Vec::new();
    let mut ys: Vec<T> = Vec::new();
    for m in levels.0..=levels.1 {
        let radius_t = T::exp2_i(-(m as i32));
        let r = (radius_t / h).round().to_f64().unwrap_or(0.0) as i64;
        if r < 1 {
            continue;
        }
        let lo = center.saturating_sub(r as usize);
        let hi = (center + r as usize).min(n);
        let window = &values[lo..=hi];
        let mut vmin = window[0];
        let mut vmax = window[0];
        for &v in window {
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let osc = vmax - vmin;
        if osc > T::zero() {
            xs.push(-T::from_f64_c(m as f64));
            ys.push(osc.log2());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Domain(
            "oscillation regression needs at least three non-degenerate window levels".into(),
        ));
    }
    let (slope, r2) = least_squares(&xs, &ys);
    if !(slope > T::zero()) {
        return Err(Error::Domain(
            "non-positive oscillation slope: path not Hölder-rough at this point".into(),
        ));
    }
    Ok((slope.min(T::one()), r2))
}

/// Pointwise-exponent report over 50 evenly spaced interior times, with the
/// modulus statistic and its two-resolution stability flag.
///
/// Requires at least `2^10` samples.  Points where the regression is
/// degenerate are dropped; an entirely degenerate (e.g. constant) path is an
/// error.
pub fn holder_estimate<T: Real>(
    path: &PathSample<T>,
    levels: (u32, u32),
) -> Result<RegularityReport<T>> {
    let n = path.total.len().saturating_sub(1);
    if path.total.len() < (1 << 10) {
        return Err(Error::invalid(
            "pointwise estimation needs at least 2^10 samples",
        ));
    }
    let mut pointwise = Vec::new();
    let mut r_squared = Vec::new();
    for q in 1..=N_ESTIMATION_POINTS {
        let idx = (q * n).div_euclid(N_ESTIMATION_POINTS + 1);
        match pointwise_exponent(&path.times, &path.total, idx, levels) {
            Ok((gamma, r2)) => {
                pointwise.push((path.times[idx], gamma));
                r_squared.push(r2);
            }
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if pointwise.is_empty() {
        return Err(Error::Domain(
            "every estimation point was degenerate; constant path?".into(),
        ));
    }
    let global = median(pointwise.iter().map(|&(_, g)| g).collect());
    let d = path.params.chaos_order;
    let log_exp = T::from_usize_c(d) / T::from_f64_c(2.0);
    let b = T::from_f64_c(2.0);
    let (sup, _, stable) =
        modulus_stability(&path.times, &path.total, path.params.hurst, b, log_exp, 2)?;
    Ok(RegularityReport {
        pointwise_exponents: pointwise,
        global_exponent: global,
        modulus_sup: sup,
        modulus_stable: stable,
        fit_diagnostics: FitDiagnostics {
            m_lo: levels.0,
            m_hi: levels.1,
            r_squared,
        },
    })
}

/// Grid supremum of `|X_t - X_s| / (|t-s|^H (log(b + |t-s|^{-1}))^e)` over
/// all sampled pairs, for an arbitrary log-exponent `e`.
///
/// Requires a uniform grid and `b > 1`.  The scan groups pairs by lag so the
/// transcendental weight is evaluated once per lag.
pub fn modulus_statistic_with_exponent<T: Real>(
    times: &[T],
    values: &[T],
    hurst: T,
    b: T,
    log_exp: T,
) -> Result<T> {
    validate_series(times, values)?;
    if !(b > T::one()) {
        return Err(Error::invalid("modulus base must satisfy b > 1"));
    }
    if !(hurst > T::zero() && hurst < T::one()) {
        return Err(Error::invalid("Hurst index must lie in (0, 1)"));
    }
    let h = step(times);
    let n = values.len() - 1;
    let mut sup = T::zero();
    for lag in 1..=n {
        let mut dmax = T::zero();
        for i in 0..=(n - lag) {
            let d = (values[i + lag] - values[i]).abs();
            dmax = dmax.max(d);
        }
        let dt = T::from_usize_c(lag) * h;
        let weight = dt.powf(hurst) * (b + dt.recip()).ln().powf(log_exp);
        sup = sup.max(dmax / weight);
    }
    Ok(sup)
}

/// Modulus statistic with the process's own log-exponent `d/2` and `b = 2`.
pub fn modulus_statistic<T: Real>(path: &PathSample<T>, b: T) -> Result<T> {
    let log_exp = T::from_usize_c(path.params.chaos_order) / T::from_f64_c(2.0);
    modulus_statistic_with_exponent(&path.times, &path.total, path.params.hurst, b, log_exp)
}

/// Two-resolution stability check of the modulus statistic.
///
/// Computes the statistic on the full grid and on the `factor`-fold
/// subsample (every `factor`-th point), and flags stability when
/// `fine / coarse ≤ 5/4`.  Returns `(fine, coarse, stable)`.  The coarse
/// pair set is contained in the fine one, so `fine ≥ coarse` always; an
/// unstable statistic is one still growing as finer pairs enter.
pub fn modulus_stability<T: Real>(
    times: &[T],
    values: &[T],
    hurst: T,
    b: T,
    log_exp: T,
    factor: usize,
) -> Result<(T, T, bool)> {
    if factor < 2 {
        return Err(Error::invalid("subsampling factor must be at least 2"));
    }
    let n = values.len().saturating_sub(1);
    if n % factor != 0 || n / factor < 2 {
        return Err(Error::invalid(
            "grid does not subsample evenly at this factor",
        ));
    }
    let fine = modulus_statistic_with_exponent(times, values, hurst, b, log_exp)?;
    let coarse_t: Vec<T> = times.iter().copied().step_by(factor).collect();
    let coarse_v: Vec<T> = values.iter().copied().step_by(factor).collect();
    let coarse = modulus_statistic_with_exponent(&coarse_t, &coarse_v, hurst, b, log_exp)?;
    let ratio = if coarse > T::zero() { fine / coarse } else { T::one() };
    Ok((fine, coarse, ratio <= T::from_f64_c(STABILITY_RATIO)))
}

/// Grid supremum of `|X_t| / ((1+t)^H (log log(c + t))^{d/2})` over sampled
/// times `t ≤ t_cap`.
///
/// Requires `c > 3` (so the iterated logarithm is positive) and
/// `t_cap ≥ 16`.
pub fn growth_statistic_upto<T: Real>(
    times: &[T],
    values: &[T],
    hurst: T,
    chaos_order: usize,
    c: T,
    t_cap: T,
) -> Result<T> {
    validate_series(times, values)?;
    if !(c > T::from_f64_c(3.0)) {
        return Err(Error::invalid("growth base must satisfy c > 3"));
    }
    if !(t_cap >= T::from_f64_c(16.0)) {
        return Err(Error::invalid("growth statistic needs a horizon T >= 16"));
    }
    let e = T::from_usize_c(chaos_order) / T::from_f64_c(2.0);
    let mut sup = T::zero();
    for (&t, &v) in times.iter().zip(values.iter()) {
        if t > t_cap {
            break;
        }
        let weight = (T::one() + t).powf(hurst) * (c + t).ln().ln().powf(e);
        sup = sup.max(v.abs() / weight);
    }
    Ok(sup)
}

/// Growth statistic over the whole sampled horizon.
pub fn growth_statistic<T: Real>(path: &PathSample<T>, c: T) -> Result<T> {
    let end = *path
        .times
        .last()
        .ok_or_else(|| Error::invalid("empty path"))?;
    growth_statistic_upto(
        &path.times,
        &path.total,
        path.params.hurst,
        path.params.chaos_order,
        c,
        end,
    )
}

/// Reject empty, mismatched, or non-uniform sampling grids.
fn validate_series<T: Real>(times: &[T], values: &[T]) -> Result<()> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::invalid(
            "need matching time/value arrays with at least 3 samples",
        ));
    }
    let h = step(times);
    if !(h > T::zero()) {
        return Err(Error::invalid("time grid must be increasing"));
    }
    let tol = T::from_f64_c(1e-9) * h.max(T::one());
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > tol {
            return Err(Error::invalid("time grid must be uniform"));
        }
    }
    Ok(())
}

fn validate_levels(levels: (u32, u32)) -> Result<()> {
    if levels.0 < 1 || levels.1 > 30 || levels.1 < levels.0 + 2 {
        return Err(Error::invalid(
            "window levels must satisfy 1 <= m_lo <= m_hi - 2 <= 28",
        ));
    }
    Ok(())
}

fn step<T: Real>(times: &[T]) -> T {
    times[1] - times[0]
}

/// Ordinary least squares of `y` on `x`; returns `(slope, R²)`.
fn least_squares<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = T::from_usize_c(xs.len());
    let mean = |v: &[T]| v.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > T::zero() {
        (sxy * sxy) / (sxx * syy)
    } else {
        T::one()
    };
    (slope, r2)
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).expect("exponents are finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::from_f64_c(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::FbmSampler;

    fn grid(n: usize, t_max: f64) -> Vec<f64> {
        (0..=n).map(|i| i as f64 * t_max / n as f64).collect()
    }

    #[test]
    fn power_function_exponent_at_the_origin() {
        let n = 1 << 12;
        let times = grid(n, 1.0);
        let values: Vec<f64> = times.iter().map(|&t| t.powf(0.6)).collect();
        let (gamma, r2) = pointwise_exponent(&times, &values, 0, (4, 10)).unwrap();
        assert!((gamma - 0.6).abs() < 0.02, "gamma = {gamma}");
        assert!(r2 > 0.999, "r2 = {r2}");
        // Away from the origin t^0.6 is smooth, so the estimate saturates.
        let (g_mid, _) = pointwise_exponent(&times, &values, n / 2, (4, 10)).unwrap();
        assert!(g_mid >= 0.98, "g_mid = {g_mid}");
    }

    #[test]
    fn ramp_saturates_at_one_and_constant_is_degenerate() {
        let n = 1 << 11;
        let times = grid(n, 1.0);
        let ramp: Vec<f64> = times.iter().map(|&t| 3.0 * t - 1.0).collect();
        let (gamma, r2) = pointwise_exponent(&times, &ramp, n / 3, (4, 9)).unwrap();
        assert!(gamma >= 0.98 && gamma <= 1.0, "gamma = {gamma}");
        assert!(r2 > 0.999);
        let flat = vec![2.5f64; n + 1];
        assert!(pointwise_exponent(&times, &flat, n / 2, (4, 9)).is_err());
    }

    #[test]
    fn fbm_modulus_is_stable_but_plain_hoelder_is_not() {
        let n = 1 << 13;
        let sampler = FbmSampler::<f64>::new(0.7, n).unwrap();
        let values = sampler.sample_path(11);
        let times = grid(n, 1.0);
        // Gaussian modulus: log-exponent 1/2 -> stable under refinement.
        let (fine, coarse, stable) =
            modulus_stability(&times, &values, 0.7, 2.0, 0.5, 4).unwrap();
        assert!(stable, "fine = {fine}, coarse = {coarse}");
        assert!(fine >= coarse);
        // Plain Hölder ratio keeps growing as finer pairs appear (the
        // effect scales with the log-exponent deficit, so for the Gaussian
        // case it is a few percent; the order-2 acceptance path shows the
        // full >= 10%).
        let (pf, pc, _) = modulus_stability(&times, &values, 0.7, 2.0, 0.0, 4).unwrap();
        assert!(pf / pc > 1.02, "plain ratio = {}", pf / pc);
        assert!(fine / coarse < pf / pc, "log correction should tighten the ratio");
    }

    #[test]
    fn growth_statistic_stabilizes_on_a_long_fbm_horizon() {
        let n = 1 << 13;
        let t_max: f64 = 64.0;
        let sampler = FbmSampler::<f64>::new(0.7, n).unwrap();
        // Rescale the unit-interval realization onto [0, 64]: exact in law
        // by self-similarity.
        let scale = t_max.powf(0.7);
        let values: Vec<f64> = sampler.sample_path(5).iter().map(|v| v * scale).collect();
        let times = grid(n, t_max);
        let half = growth_statistic_upto(&times, &values, 0.7, 1, 4.0, 32.0).unwrap();
        let full = growth_statistic_upto(&times, &values, 0.7, 1, 4.0, 64.0).unwrap();
        assert!(full.is_finite() && full > 0.0);
        assert!(full >= half);
        assert!(full / half <= 1.3, "ratio = {}", full / half);
        // Preconditions.
        assert!(growth_statistic_upto(&times, &values, 0.7, 1, 3.0, 64.0).is_err());
        assert!(growth_statistic_upto(&times, &values, 0.7, 1, 4.0, 8.0).is_err());
    }

    #[test]
    fn zero_path_has_zero_growth() {
        let n = 1 << 10;
        let times = grid(n, 32.0);
        let values = vec![0.0f64; n + 1];
        let g = growth_statistic_upto(&times, &values, 0.7, 2, 4.0, 32.0).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn validation_rejects_bad_grids_and_parameters() {
        let times = grid(16, 1.0);
        let values = vec![0.0f64; 17];
        let mut crooked = times.clone();
        crooked[5] += 1e-3;
        assert!(modulus_statistic_with_exponent(&crooked, &values, 0.7, 2.0, 0.5).is_err());
        assert!(modulus_statistic_with_exponent(&times, &values, 0.7, 1.0, 0.5).is_err());
        assert!(modulus_statistic_with_exponent(&times, &values, 1.2, 2.0, 0.5).is_err());
        assert!(pointwise_exponent(&times, &values, 99, (4, 10)).is_err());
        assert!(pointwise_exponent(&times, &values, 3, (4, 3)).is_err());
        assert!(modulus_stability(&times, &values, 0.7, 2.0, 0.5, 3).is_err());
    }
}
