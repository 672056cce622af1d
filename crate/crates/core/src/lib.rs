//! Graph families, spectral gaps of the discrete p-Laplacian, volume
//! distributions and distortion of embeddings into `ℓ_p`.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for common use.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distortion;
pub mod families;
pub mod graph;
pub mod inequalities;
pub mod linalg;
pub mod metric;
pub mod optim;
pub mod scalar;
pub mod spectral;
pub mod volume;

pub use scalar::Scalar;

pub type Embedding64 = distortion::Embedding<f64>;
pub type Embedding32 = distortion::Embedding<f32>;
pub type DistortionReport64 = distortion::DistortionReport<f64>;
pub type DistortionReport32 = distortion::DistortionReport<f32>;
pub type SpectralResult64 = spectral::SpectralResult<f64>;
pub type SpectralResult32 = spectral::SpectralResult<f32>;
pub type InequalityReport64 = inequalities::InequalityReport<f64>;
pub type InequalityReport32 = inequalities::InequalityReport<f32>;
pub type FamilySweepRow64 = inequalities::FamilySweepRow<f64>;
pub type FamilySweepRow32 = inequalities::FamilySweepRow<f32>;
