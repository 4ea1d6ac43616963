//! Command-line front end for `underlay-core`: scenario files, figure
//! tables, parameter sweeps and the analytic-versus-simulation report.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod sweep;

pub use config::Config;
pub use error::CliError;
pub use figures::FigureId;
