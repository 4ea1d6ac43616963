//! Probability laws of the estimators and of the estimated rate.
//!
//! Every estimator in the model is a scaled sum of squared Gaussians, i.e.
//! a non-central chi-squared law ([`NcChiSq`]). The analytic layers replace
//! it by the Gamma law with the same mean and variance ([`GammaApprox`]);
//! the samplers draw the exact law through the signal model so the Monte
//! Carlo layer checks the approximation itself.

mod approx;
mod capacity;
mod nakagami;
mod sampling;

pub use approx::{estimator_cdf, gamma_match, GammaApprox, NcChiSq};
pub use capacity::CapacityDist;
pub use nakagami::{nakagami_gain_cdf, NakagamiGain};
pub use sampling::{rng_stream, sample_nakagami, sample_ncx2, RngStream};
