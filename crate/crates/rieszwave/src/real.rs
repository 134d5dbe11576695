use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{de::DeserializeOwned, Serialize};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};

/// Scalar type over which every numerical routine in this crate is generic.
///
/// Implemented for `f32` and `f64`. The documented accuracy targets
/// (quadrature tolerances, table interpolation error, acceptance thresholds)
/// are stated for `f64`; `f32` instantiates the whole crate but cannot reach
/// tolerances finer than its ~7 significant digits.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Product
    + Display
    + Debug
    + LowerExp
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Draw one standard normal variate from `rng`.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossless conversion from `f64` where possible (`f32` rounds).
    ///
    /// Used for embedding double-precision constants (filter taps, gamma
    /// constants) into generic code; panics never, rounds at worst.
    fn from_f64_c(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant converts to any Real")
    }

    /// Shorthand for `from_f64_c` on integer-valued constants.
    fn from_usize_c(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in any Real (possibly rounded)")
    }

    /// Shorthand conversion from `i64`.
    fn from_i64_c(n: i64) -> Self {
        Self::from_i64(n).expect("i64 fits in any Real (possibly rounded)")
    }

    /// `2^j` for possibly negative integer `j`.
    fn exp2_i(j: i32) -> Self {
        Self::from_f64_c((j as f64).exp2())
    }
}

impl Real for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp2_handles_negative_levels() {
        assert_eq!(f64::exp2_i(-3), 0.125);
        assert_eq!(f64::exp2_i(0), 1.0);
        assert_eq!(f32::exp2_i(4), 16.0f32);
    }

    #[test]
    fn constant_embedding_round_trips() {
        assert_eq!(f64::from_f64_c(0.1), 0.1);
        assert_eq!(f64::from_i64_c(-7), -7.0);
        assert_eq!(f32::from_usize_c(3), 3.0f32);
    }
}
