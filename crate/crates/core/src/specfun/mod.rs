//! Numerical kernels shared by the models: log-gamma, the regularized
//! incomplete gamma function and its inverse, adaptive quadrature,
//! bracketed root finding, golden-section search and Gauss rules for
//! Gamma-distributed expectations.
//!
//! Everything here is a pure function of its arguments.

mod gamma;
mod gauss_gamma;
mod normal;
mod optimize;
mod quad;
mod roots;

pub use gamma::{
    gamma_ln_pdf, inv_reg_upper_gamma, ln_beta, ln_gamma, reg_lower_gamma, reg_upper_gamma, trigamma,
};
pub use gauss_gamma::{gamma_rule, GaussRule};
pub use normal::inv_std_normal_upper;
pub use optimize::{golden_section_max, Extremum};
pub use quad::{integrate, integrate_with_points, Quadrature};
pub use roots::find_root;

use crate::Real;

/// Stopping rules for the iterative kernels.
///
/// The defaults are `abs_tol = 1e-10`, `rel_tol = 1e-8`, `max_iter = 200`
/// for `f64`; for narrower types the tolerances are floored at a small
/// multiple of machine epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Tolerance {
            abs_tol: T::c(1e-10).max(eps * T::c(1000.0)),
            rel_tol: T::c(1e-8).max(eps * T::c(1000.0)),
            max_iter: 200,
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_iter: usize) -> crate::error::Result<Self> {
        let t = Tolerance {
            abs_tol,
            rel_tol,
            max_iter,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if !(self.abs_tol > T::zero() && self.rel_tol > T::zero() && self.max_iter >= 1) {
            return Err(crate::NumericError::domain(
                "Tolerance",
                format!(
                    "need abs_tol > 0, rel_tol > 0, max_iter >= 1 (got {}, {}, {})",
                    self.abs_tol, self.rel_tol, self.max_iter
                ),
            ));
        }
        Ok(())
    }

    /// Same iteration budget, with the bracket tolerance pushed to a few
    /// ulps. Used where a residual bound is part of the contract.
    pub fn tight(&self) -> Self {
        Tolerance {
            abs_tol: self.abs_tol.min(T::c(1e-12)).max(T::epsilon() * T::c(4.0)),
            rel_tol: T::epsilon() * T::c(4.0),
            max_iter: self.max_iter.max(200),
        }
    }
}
