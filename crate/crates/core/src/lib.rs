//! Tail-sensitive goodness-of-fit testing.
//!
//! The statistic
//!
//! ```text
//! A = -(a/n) * sum_i ln(1 - F(x_i)^a)
//! ```
//!
//! weights observations whose probability-integral transform sits close to
//! one (right test) or, with `F -> 1 - F`, close to zero (left test). This
//! crate computes the statistic, its exact null distribution for finite
//! `(a, n)` by Fourier inversion of the characteristic function, the limiting
//! law for `a, n -> inf` with `a/n` fixed, a Monte Carlo sampler of the null,
//! averaged empirical CDFs usable as a surrogate model, and a
//! Kolmogorov-Smirnov baseline.

pub mod asymptotic;
pub mod baseline_ks;
pub mod ecdf;
mod error;
mod inversion;
pub mod mc_oracle;
pub mod model;
pub mod null_dist;
mod quadrature;
pub mod specfun;
pub mod statistic;

pub use error::{Error, Result};
pub use model::CdfModel;
