//! Synthesis and numerical verification of self-similar Wiener-chaos processes
//! driven by Riesz potentials of Meyer wavelets.
//!
//! The central object is the order-`d` chaos process
//!
//! ```text
//! X_t = I_d(h_t),    h_t(x) = k_{a}(t* - x) - k_{a}(x),    a = alpha + 1,
//! ```
//!
//! where `I_d` is the `d`-fold Wiener-Itô integral against a Brownian sheet on
//! `R^d`, `k_a` is the Riesz kernel of order `a`, `t* = (t, ..., t)`, and
//! `alpha = H + d/2 - 1` for a Hurst index `H` in `(1/2, 1)`. The process is
//! `H`-self-similar with stationary increments and shares the fractional
//! Brownian motion covariance; `d = 1` *is* fractional Brownian motion.
//!
//! The crate synthesizes sample paths through an almost-surely convergent
//! wavelet-type expansion
//!
//! ```text
//! X_t = sum_{j,k,eps} 2^{-jH} [ I^{alpha+1}(psi^(eps))(2^j t* - k)
//!                             - I^{alpha+1}(psi^(eps))(-k) ] · I_d(psi^(eps)_{j,k})
//! ```
//!
//! over tensor Meyer wavelets `psi^(eps)_{j,k}`, with the chaos values
//! `I_d(psi^(eps)_{j,k})` sampled *jointly* (they are correlated across levels)
//! via a Gaussian multiresolution cascade and Hermite polynomial products.
//!
//! # Module map
//!
//! - [`riesz`] — process parameters, the Riesz kernel `k_alpha`, its
//!   normalizing constant `gamma_d(alpha)`, and the kernel norm `‖h_t‖_2`.
//! - [`meyer`] — Lemarié–Meyer scaling function and wavelet in the Fourier
//!   domain, tensor basis indexing, and the two-scale filter pair.
//! - [`potential`] — Riesz potential `I^{alpha+1}` and the inverse operator
//!   `D^{alpha+1}` applied to tensor wavelets; tabulation, interpolation, and
//!   decay diagnostics.
//! - [`chaos`] — joint sampling of the Gaussian wavelet/scaling atoms and the
//!   chaos values built from them; analytic chaos covariances.
//! - [`synth`] — truncated series assembly into paths and fields, with
//!   variance audits and deterministic parallel evaluation; [`fbm`] holds an
//!   independent circulant-embedding fBm reference generator.
//! - [`analysis`] — Hölder/modulus/growth estimators, small-ball statistics,
//!   dual coefficient recovery, box-counting and closed-form dimension bounds.
//! - [`io`] — deterministic CSV writers and the JSON run manifest.
//!
//! All numerics are generic over the scalar type through the [`Real`] trait
//! (implemented for `f32` and `f64`); the `*64` aliases at the crate root fix
//! the default double-precision instantiation. Quoted accuracy targets
//! throughout the documentation refer to `f64`.

pub mod analysis;
pub mod chaos;
mod error;
pub mod fbm;
mod fftutil;
pub mod gamma;
mod interp;
pub mod io;
pub mod meyer;
pub mod potential;
pub mod quad;
mod real;
pub mod riesz;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use real::Real;

pub use meyer::{BasisFn, FilterPair, WaveletIndex};
pub use riesz::{derive_params, ProcessParams, RieszKernelSpec};

/// Double-precision process parameters.
pub type ProcessParams64 = riesz::ProcessParams<f64>;
/// Double-precision Riesz kernel description.
pub type RieszKernelSpec64 = riesz::RieszKernelSpec<f64>;
/// Double-precision two-scale filter pair.
pub type FilterPair64 = meyer::FilterPair<f64>;
/// Double-precision potential table.
pub type PotentialTable64 = potential::PotentialTable<f64>;
/// Double-precision memoized table store.
pub type TableStore64 = potential::TableStore<f64>;
/// Double-precision cascade sampler.
pub type CascadeSampler64 = chaos::CascadeSampler<f64>;
/// Double-precision sampled cascade field.
pub type CascadeField64 = chaos::CascadeField<f64>;
/// Double-precision truncation specification.
pub type TruncationSpec64 = synth::TruncationSpec<f64>;
/// Double-precision synthesizer.
pub type Synthesizer64 = synth::Synthesizer<f64>;
/// Double-precision path sample.
pub type PathSample64 = synth::PathSample<f64>;
/// Double-precision field sample.
pub type FieldSample64 = synth::FieldSample<f64>;
/// Double-precision variance audit.
pub type VarianceAudit64 = synth::VarianceAudit<f64>;
/// Double-precision fBm reference sampler.
pub type FbmSampler64 = fbm::FbmSampler<f64>;
/// Double-precision regularity report.
pub type RegularityReport64 = analysis::RegularityReport<f64>;
/// Double-precision dimension report.
pub type DimensionReport64 = analysis::DimensionReport<f64>;
/// Double-precision small-ball report.
pub type SmallBallReport64 = analysis::SmallBallReport<f64>;
/// Double-precision dual kernel tables.
pub type DualTables64 = analysis::DualTables<f64>;
