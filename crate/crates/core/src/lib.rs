//! Performance analysis of an underlay cognitive-radio secondary link that
//! only knows its channels through estimates.
//!
//! The secondary transmitter (ST) learns the gain towards the primary
//! receiver (PR) from the average received power over `τ·f_s` samples,
//! picks a transmit power that keeps the probability of harming the PR
//! below `ρ_out`, and spends the rest of the frame sending data. The crate
//! evaluates that controlled power, the regime boundary `γ*` between
//! interference- and power-limited operation, and the resulting
//! estimation-throughput tradeoff, for deterministic and Nakagami-m
//! channels. A frame-by-frame Monte Carlo simulator of the raw signal
//! models checks every analytic result.
//!
//! The analytic layers are generic over the scalar type through [`Real`];
//! the aliases below fix the scalar to `f64`, which is what the Monte
//! Carlo layer and the CLI use.
//!
//! ```
//! use underlay_core::{Scenario, power_control, throughput};
//!
//! let params = Scenario::default();
//! let pc = power_control::controlled_power_det(&params, 1e-3, &Default::default()).unwrap();
//! assert!(pc.p_cont < params.p_full);
//! let ideal = throughput::throughput_ideal_det(&params);
//! assert!((ideal - 6f64.log2()).abs() < 1e-9);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dists;
pub mod error;
pub mod montecarlo;
pub mod power_control;
pub mod scenario;
pub mod specfun;
pub mod throughput;
pub mod units;
pub mod validation;

mod real;

pub use error::NumericError;
pub use real::Real;

/// Double-precision instantiations of the generic types.
pub type Tolerance = specfun::Tolerance<f64>;
pub type Scenario = scenario::ScenarioParams<f64>;
pub type GammaApprox = dists::GammaApprox<f64>;
pub type NcChiSq = dists::NcChiSq<f64>;
pub type NakagamiGain = dists::NakagamiGain<f64>;
pub type CapacityDist = dists::CapacityDist<f64>;
pub type FadingSpec = scenario::FadingSpec<f64>;
pub type PowerControlResult = power_control::PowerControlResult<f64>;
pub type TradeoffCurve = throughput::TradeoffCurve<f64>;
