//! Gamma function via the Lanczos approximation.
//!
//! Γ enters this crate only through the Riesz normalizing constant
//! `gamma_d(alpha)` (a ratio of two Γ values) and a handful of closed-form
//! norms in tests. The classic Lanczos fit with `g = 7` and nine terms
//! delivers ~13 significant digits over the whole real line once the Euler
//! reflection formula handles arguments below `1/2`, which comfortably clears
//! the 12-digit requirement on the constant.

use crate::real::Real;

/// Lanczos coefficients for `g = 7`, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function `Γ(x)` for real `x`.
///
/// Accurate to roughly 13 significant digits in `f64`. At the poles
/// (`x = 0, -1, -2, ...`) the reflection denominator `sin(πx)` vanishes and a
/// non-finite value is returned; callers that can hit a pole must test
/// [`is_gamma_pole`] first.
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::from_f64_c(0.5);
    if x < half {
        if is_gamma_pole(x) {
            // sin(πx) below is only approximately zero in floats; make the
            // pole explicit instead of returning a huge finite value.
            return T::nan();
        }
        // Euler reflection: Γ(x) Γ(1-x) = π / sin(πx).
        let pi = T::PI();
        let sin_pi_x = (pi * x).sin();
        pi / (sin_pi_x * gamma_core(T::one() - x))
    } else {
        gamma_core(x)
    }
}

/// Lanczos core, valid for `x ≥ 1/2`.
fn gamma_core<T: Real>(x: T) -> T {
    let g = T::from_f64_c(LANCZOS_G);
    let half = T::from_f64_c(0.5);
    let z = x - T::one();
    let mut acc = T::from_f64_c(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + T::from_f64_c(c) / (z + T::from_usize_c(i));
    }
    let t = z + g + half;
    let sqrt_two_pi = (T::PI() + T::PI()).sqrt();
    sqrt_two_pi * t.powf(z + half) * (-t).exp() * acc
}

/// True when `x` is a pole of Γ, i.e. a non-positive integer
/// (up to floating-point equality).
pub fn is_gamma_pole<T: Real>(x: T) -> bool {
    x <= T::zero() && x.fract() == T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let rel = ((actual - expected) / expected).abs();
        assert!(
            rel <= tol,
            "actual {actual:.17e}, expected {expected:.17e}, rel err {rel:.2e}"
        );
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert_rel(gamma(1.0), 1.0, 1e-14);
        assert_rel(gamma(2.0), 1.0, 1e-14);
        assert_rel(gamma(5.0), 24.0, 1e-14);
        // Γ(1/2) = √π.
        assert_rel(gamma(0.5), f64::sqrt(std::f64::consts::PI), 1e-14);
        // Γ(-1/2) = -2√π by reflection.
        assert_rel(gamma(-0.5), -2.0 * f64::sqrt(std::f64::consts::PI), 1e-13);
    }

    #[test]
    fn high_precision_reference_points() {
        // Reference values computed with 40-digit arithmetic.
        assert_rel(gamma(0.25), 3.625_609_908_221_908_3, 5e-13);
        assert_rel(gamma(0.1), 9.513_507_698_668_731_8, 5e-13);
        assert_rel(gamma(1.35), 0.891_151_442_024_300_80, 5e-13);
        assert_rel(gamma(-1.3), 3.328_347_006_788_609_28, 5e-13);
        assert_rel(gamma(7.5), 1_871.254_305_797_788_3, 5e-13);
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.3, 0.85, 1.2, 2.7, -0.4, -2.35] {
            assert_rel(gamma(x + 1.0), x * gamma(x), 5e-13);
        }
    }

    #[test]
    fn poles_detected_and_non_finite() {
        assert!(is_gamma_pole(0.0));
        assert!(is_gamma_pole(-3.0));
        assert!(!is_gamma_pole(-3.5));
        assert!(!is_gamma_pole(2.0));
        assert!(!gamma(0.0f64).is_finite());
        assert!(!gamma(-2.0f64).is_finite());
    }

    #[test]
    fn f32_instantiation_is_sane() {
        let g: f32 = gamma(0.5f32);
        assert!((g - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }
}
