use crate::error::Result;
use crate::specfun::reg_lower_gamma;
use crate::{NumericError, Real};

use super::GammaApprox;

/// Power gain of a Nakagami-m link: Gamma(shape `m`, scale `mean_gain/m`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiGain<T> {
    m: T,
    mean_gain: T,
}

impl<T: Real> NakagamiGain<T> {
    pub fn new(m: T, mean_gain: T) -> Result<Self> {
        if !(m >= T::c(0.5) && m.is_finite()) {
            return Err(NumericError::domain("NakagamiGain", format!("m must be >= 0.5, got {m}")));
        }
        if !(mean_gain > T::zero() && mean_gain.is_finite()) {
            return Err(NumericError::domain(
                "NakagamiGain",
                format!("mean gain must be positive, got {mean_gain}"),
            ));
        }
        Ok(NakagamiGain { m, mean_gain })
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn mean_gain(&self) -> T {
        self.mean_gain
    }

    pub fn scale(&self) -> T {
        self.mean_gain / self.m
    }

    pub fn as_gamma(&self) -> GammaApprox<T> {
        GammaApprox::new(self.m, self.scale()).expect("validated at construction")
    }

    /// Same fading severity around a different mean.
    pub fn with_mean(&self, mean_gain: T) -> Result<Self> {
        Self::new(self.m, mean_gain)
    }
}

/// `P(|h|² ≤ x)`.
pub fn nakagami_gain_cdf<T: Real>(spec: &NakagamiGain<T>, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(NumericError::domain("nakagami_gain_cdf", format!("x must be >= 0, got {x}")));
    }
    reg_lower_gamma(spec.m, spec.m * x / spec.mean_gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_is_exponential() {
        let spec = NakagamiGain::new(1.0, 2.5).unwrap();
        for x in [0.0, 0.1, 1.0, 2.5, 10.0] {
            let want = 1.0 - (-x / 2.5f64).exp();
            assert!((nakagami_gain_cdf(&spec, x).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn agrees_with_generic_gamma_cdf() {
        let spec = NakagamiGain::new(5.0_f64, 1e-10).unwrap();
        let a = nakagami_gain_cdf(&spec, 1e-10).unwrap();
        let b = spec.as_gamma().cdf(1e-10).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn domain() {
        assert!(NakagamiGain::new(0.4, 1.0).is_err());
        assert!(NakagamiGain::new(1.0, 0.0).is_err());
        let spec = NakagamiGain::new(1.0, 1.0).unwrap();
        assert!(nakagami_gain_cdf(&spec, -1.0).is_err());
    }
}
