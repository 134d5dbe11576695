//! Gauss–Legendre quadrature building blocks.
//!
//! Every integrand in this crate is either band-limited (Fourier inversions
//! over the compact Meyer spectral support) or piecewise smooth with known
//! singular points (Riesz kernel norms), so composite Gauss–Legendre panels
//! with explicit breakpoints — plus an adaptive bisection fallback — cover all
//! quadrature needs. Nodes are computed once per order by Newton iteration on
//! the Legendre recurrence and cached.

use crate::real::Real;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed in `f64` and cached per order.
pub fn gl_rule(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("gl_rule cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(compute_gl(n))).clone()
}

/// Newton iteration for the roots of the Legendre polynomial `P_n`.
fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be at least 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = (n as f64) * (pm1 - x * p) / (1.0 - x * x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
        if n % 2 == 1 && i == n / 2 {
            nodes[i] = 0.0;
        }
    }
    (nodes, weights)
}

/// `∫_a^b f` by a single `n`-point Gauss–Legendre panel.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, n: usize) -> T {
    let rule = gl_rule(n);
    let half = T::from_f64_c(0.5);
    let mid = (a + b) * half;
    let rad = (b - a) * half;
    let mut acc = T::zero();
    for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
        acc += T::from_f64_c(w) * f(mid + rad * T::from_f64_c(x));
    }
    acc * rad
}

/// `∫ f` over consecutive panels `[pts[0], pts[1]], [pts[1], pts[2]], …`,
/// each with an `n`-point rule.
pub fn integrate_panels<T: Real, F: Fn(T) -> T>(f: F, pts: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for w in pts.windows(2) {
        acc += integrate(&f, w[0], w[1], n);
    }
    acc
}

/// `∫_a^b f` for an integrand oscillating with angular frequency up to
/// `omega`: the interval is split so each panel sees at most ~6 radians,
/// keeping a 32-point rule in its spectral-convergence regime.
pub fn integrate_osc<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, omega: f64) -> T {
    let len = (b - a).to_f64().unwrap_or(0.0).abs();
    let panels = ((len * omega.abs().max(1.0) / 6.0).ceil() as usize).clamp(1, 1 << 20);
    let mut pts = Vec::with_capacity(panels + 1);
    let pf = T::from_usize_c(panels);
    for i in 0..=panels {
        pts.push(a + (b - a) * T::from_usize_c(i) / pf);
    }
    integrate_panels(f, &pts, 32)
}

/// Adaptive `∫_a^b f`: compares one `n`-point panel with its bisection and
/// recurses until the difference is below `tol` (absolute), returning the
/// refined value and an error estimate.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T + Copy>(
    f: F,
    a: T,
    b: T,
    tol: T,
    n: usize,
    max_depth: u32,
) -> (T, T) {
    let whole = integrate(f, a, b, n);
    adaptive_step(f, a, b, whole, tol, n, max_depth)
}

fn adaptive_step<T: Real, F: Fn(T) -> T + Copy>(
    f: F,
    a: T,
    b: T,
    whole: T,
    tol: T,
    n: usize,
    depth: u32,
) -> (T, T) {
    let half = T::from_f64_c(0.5);
    let mid = (a + b) * half;
    let left = integrate(f, a, mid, n);
    let right = integrate(f, mid, b, n);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol || depth == 0 {
        return (refined, err);
    }
    let half_tol = tol * half;
    let (lv, le) = adaptive_step(f, a, mid, left, half_tol, n, depth - 1);
    let (rv, re) = adaptive_step(f, mid, b, right, half_tol, n, depth - 1);
    (lv + rv, le + re)
}

/// Geometrically graded breakpoints from `a` toward `b` (both positive
/// distances from a singularity at 0): `a, a·r, a·r², …` capped at `b`.
///
/// Used to resolve integrable power singularities `x^s`, `s > -1`: geometric
/// panels equidistribute the error of a fixed-order rule.
pub fn geometric_breakpoints<T: Real>(a: T, b: T, ratio: f64) -> Vec<T> {
    assert!(ratio > 1.0, "grading ratio must exceed 1");
    let mut pts = vec![a];
    let r = T::from_f64_c(ratio);
    let mut x = a;
    while x < b {
        x = x * r;
        pts.push(x.min(b));
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rule_is_symmetric_and_normalized() {
        for n in [1, 2, 5, 16, 33, 64] {
            let rule = gl_rule(n);
            let wsum: f64 = rule.1.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}: weight sum {wsum}");
            for i in 0..n {
                assert!((rule.0[i] + rule.0[n - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        // n-point GL is exact for degree 2n-1.
        let val = integrate(|x: f64| x.powi(9) + 3.0 * x.powi(4), -1.0, 2.0, 5);
        let exact = (2.0f64.powi(10) - 1.0) / 10.0 + 3.0 * (2.0f64.powi(5) + 1.0) / 5.0;
        assert!((val - exact).abs() < 1e-12, "{val} vs {exact}");
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^10 cos(40 x) dx = sin(400)/40.
        let val = integrate_osc(|x: f64| (40.0 * x).cos(), 0.0, 10.0, 40.0);
        let exact = (400.0f64).sin() / 40.0;
        assert!((val - exact).abs() < 1e-12, "{val} vs {exact}");
    }

    #[test]
    fn adaptive_resolves_mild_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2.
        let (val, err) = integrate_adaptive(|x: f64| x.sqrt().recip(), 1e-12, 1.0, 1e-9, 16, 40);
        assert!((val - 2.0).abs() < 1e-5, "value {val}, est err {err}");
    }

    #[test]
    fn geometric_grading_covers_interval() {
        let pts = geometric_breakpoints(1e-6f64, 1.0, 2.0);
        assert_eq!(pts[0], 1e-6);
        assert_eq!(*pts.last().unwrap(), 1.0);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }
}
