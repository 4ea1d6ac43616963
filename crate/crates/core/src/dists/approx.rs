use crate::error::Result;
use crate::specfun::{inv_reg_upper_gamma, reg_lower_gamma, reg_upper_gamma, Tolerance};
use crate::{NumericError, Real};

/// Gamma law `Gamma(shape, scale)` standing in for a non-central
/// chi-squared estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox<T> {
    shape: T,
    scale: T,
}

impl<T: Real> GammaApprox<T> {
    pub fn new(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero() && scale > T::zero() && shape.is_finite() && scale.is_finite()) {
            return Err(NumericError::domain(
                "GammaApprox",
                format!("shape and scale must be positive and finite, got ({shape}, {scale})"),
            ));
        }
        Ok(GammaApprox { shape, scale })
    }

    pub fn shape(&self) -> T {
        self.shape
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn mean(&self) -> T {
        self.shape * self.scale
    }

    pub fn variance(&self) -> T {
        self.shape * self.scale * self.scale
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: T) -> Result<T> {
        estimator_cdf(self, x)
    }

    /// `P(X > x)`.
    pub fn sf(&self, x: T) -> Result<T> {
        if x < T::zero() || x.is_nan() {
            return Err(NumericError::domain("GammaApprox::sf", format!("x must be >= 0, got {x}")));
        }
        reg_upper_gamma(self.shape, x / self.scale)
    }

    /// The `x` with `P(X > x) = upper`.
    pub fn upper_quantile(&self, upper: T, tol: &Tolerance<T>) -> Result<T> {
        Ok(self.scale * inv_reg_upper_gamma(upper, self.shape, tol)?)
    }
}

/// Non-central chi-squared law with `dof` real degrees of freedom,
/// non-centrality `λ` and a multiplier `noise_scale` that carries it to
/// physical units: `X = noise_scale · Σₖ (μₖ + Zₖ)²` with `Σ μₖ² = λ`.
///
/// Mean `(dof + λ)·noise_scale`, variance `(2·dof + 4λ)·noise_scale²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcChiSq<T> {
    dof: u64,
    noncentrality: T,
    noise_scale: T,
}

impl<T: Real> NcChiSq<T> {
    pub fn new(dof: u64, noncentrality: T, noise_scale: T) -> Result<Self> {
        if dof < 1 {
            return Err(NumericError::domain("NcChiSq", "dof must be >= 1"));
        }
        if !(noncentrality >= T::zero() && noncentrality.is_finite()) {
            return Err(NumericError::domain(
                "NcChiSq",
                format!("noncentrality must be finite and >= 0, got {noncentrality}"),
            ));
        }
        if !(noise_scale > T::zero() && noise_scale.is_finite()) {
            return Err(NumericError::domain(
                "NcChiSq",
                format!("noise_scale must be positive, got {noise_scale}"),
            ));
        }
        Ok(NcChiSq {
            dof,
            noncentrality,
            noise_scale,
        })
    }

    /// Average received power over `samples` observations of a signal at
    /// `snr` above noise of power `sigma2`. Its mean is `sigma2·(1 + snr)`.
    pub fn received_power(samples: u64, snr: T, sigma2: T) -> Result<Self> {
        let n = T::from_count(samples);
        Self::new(samples, n * snr, sigma2 / n)
    }

    /// Pilot-based estimate of a power gain `gain` from `pilots` unit-power
    /// symbols in noise of power `sigma2`. Its mean is `gain + 2·sigma2/pilots`.
    pub fn pilot_gain(pilots: u64, gain: T, sigma2: T) -> Result<Self> {
        let n = T::from_count(pilots);
        Self::new(2, n * gain / sigma2, sigma2 / n)
    }

    pub fn dof(&self) -> u64 {
        self.dof
    }

    pub fn noncentrality(&self) -> T {
        self.noncentrality
    }

    pub fn noise_scale(&self) -> T {
        self.noise_scale
    }

    pub fn mean(&self) -> T {
        (T::from_count(self.dof) + self.noncentrality) * self.noise_scale
    }

    pub fn variance(&self) -> T {
        let k = T::from_count(self.dof);
        (T::c(2.0) * k + T::c(4.0) * self.noncentrality) * self.noise_scale * self.noise_scale
    }
}

/// Gamma law with the same mean and variance as `law`.
pub fn gamma_match<T: Real>(law: &NcChiSq<T>) -> GammaApprox<T> {
    let k = T::from_count(law.dof);
    let lam = law.noncentrality;
    let s1 = k + lam;
    let s2 = T::c(2.0) * k + T::c(4.0) * lam;
    GammaApprox {
        shape: s1 * s1 / s2,
        scale: law.noise_scale * s2 / s1,
    }
}

/// `P(X ≤ x)` for the Gamma stand-in of an estimator.
pub fn estimator_cdf<T: Real>(approx: &GammaApprox<T>, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(NumericError::domain("estimator_cdf", format!("x must be >= 0, got {x}")));
    }
    reg_lower_gamma(approx.shape, x / approx.scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn received_power_match_has_closed_form() {
        let sigma2 = 1e-10_f64;
        let law = NcChiSq::received_power(1000, 1.0, sigma2).unwrap();
        let g = gamma_match(&law);
        assert!((g.shape() - 1000.0 * 4.0 / 6.0).abs() < 1e-9);
        assert!((g.scale() / sigma2 - 0.003).abs() < 1e-15);
        assert!((g.mean() - 2.0 * sigma2).abs() < 1e-24);
    }

    #[test]
    fn central_two_dof_is_exponential() {
        let g = gamma_match(&NcChiSq::new(2, 0.0_f64, 3.0).unwrap());
        assert_eq!(g.shape(), 1.0);
        assert_eq!(g.scale(), 6.0);
        let c = estimator_cdf(&g, 6.0).unwrap();
        assert!((c - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn cdf_edges() {
        let g = GammaApprox::new(400.0_f64, 0.5).unwrap();
        assert_eq!(estimator_cdf(&g, 0.0).unwrap(), 0.0);
        assert!(estimator_cdf(&g, -1.0).is_err());
        let mid = estimator_cdf(&g, g.mean()).unwrap();
        assert!((mid - 0.5).abs() < 0.01);
        assert!(estimator_cdf(&g, 1e6).unwrap() > 1.0 - 1e-15);
    }

    #[test]
    fn quantile_inverts_survival() {
        let g = GammaApprox::new(666.0_f64, 3e-13).unwrap();
        let x = g.upper_quantile(0.1, &Tolerance::default()).unwrap();
        assert!((g.sf(x).unwrap() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn invalid_laws_are_rejected() {
        assert!(NcChiSq::new(0, 1.0, 1.0).is_err());
        assert!(NcChiSq::new(2, -1.0, 1.0).is_err());
        assert!(NcChiSq::new(2, 1.0, 0.0).is_err());
        assert!(GammaApprox::new(0.0, 1.0).is_err());
        assert!(GammaApprox::new(1.0, f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn match_preserves_two_moments(dof in 1u64..100_000, lam in 0.0f64..1e6, ns in 1e-14f64..1e3) {
            let law = NcChiSq::new(dof, lam, ns).unwrap();
            let g = gamma_match(&law);
            prop_assert!((g.mean() - law.mean()).abs() <= 1e-12 * law.mean());
            prop_assert!((g.variance() - law.variance()).abs() <= 1e-12 * law.variance());
        }
    }
}
