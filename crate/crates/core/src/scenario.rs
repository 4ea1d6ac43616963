//! Physical parameters of the underlay link, all in linear units.

use crate::dists::NakagamiGain;
use crate::error::Result;
use crate::{NumericError, Real};

/// Powers in mW, gains and ratios linear, times in seconds, `f_s` in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams<T> {
    pub f_s: T,
    /// Noise power σ².
    pub sigma2: T,
    /// Primary transmitter power seen at the ST, `P_Tx,PR`.
    pub p_tx_pr: T,
    /// Primary transmitter power seen at the SR, `P_Tx,PT`.
    pub p_tx_pt: T,
    /// Interference threshold θ_I at the primary receiver.
    pub theta_i: T,
    pub rho_out: T,
    /// Maximum ST transmit power.
    pub p_full: T,
    /// Frame duration.
    pub frame: T,
    /// Pilot duration; `tau_p·f_s` is the pilot count.
    pub tau_p: T,
    /// `|h_PR,ST|²·P_Tx,PR/σ²`, or its mean under fading.
    pub gamma: T,
    /// `|h_PT,SR|²`.
    pub g_pt_sr: T,
    /// `|h_ST,SR|²`.
    pub g_st_sr: T,
}

impl<T: Real> Default for ScenarioParams<T> {
    /// 1 MHz sampling, 100 ms frames with 10 pilot symbols, σ² = −100 dBm,
    /// θ_I = −110 dBm, 0 dBm primary and full ST powers, γ = 0 dB,
    /// `|h_PT,SR|²` = −100 dB, `|h_ST,SR|²` = −80 dB, ρ_out = 0.1.
    fn default() -> Self {
        ScenarioParams {
            f_s: T::c(1e6),
            sigma2: T::c(1e-10),
            p_tx_pr: T::one(),
            p_tx_pt: T::one(),
            theta_i: T::c(1e-11),
            rho_out: T::c(0.1),
            p_full: T::one(),
            frame: T::c(0.1),
            tau_p: T::c(1e-5),
            gamma: T::one(),
            g_pt_sr: T::c(1e-10),
            g_st_sr: T::c(1e-8),
        }
    }
}

impl<T: Real> ScenarioParams<T> {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "ScenarioParams";
        let positive = [
            ("f_s", self.f_s),
            ("sigma2", self.sigma2),
            ("p_tx_pr", self.p_tx_pr),
            ("p_tx_pt", self.p_tx_pt),
            ("theta_i", self.theta_i),
            ("p_full", self.p_full),
            ("frame", self.frame),
            ("tau_p", self.tau_p),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(NumericError::domain(OP, format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("gamma", self.gamma), ("g_pt_sr", self.g_pt_sr), ("g_st_sr", self.g_st_sr)] {
            if !(v >= T::zero() && v.is_finite()) {
                return Err(NumericError::domain(OP, format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.rho_out > T::zero() && self.rho_out < T::one()) {
            return Err(NumericError::domain(OP, format!("rho_out must lie in (0, 1), got {}", self.rho_out)));
        }
        if self.tau_p >= self.frame {
            return Err(NumericError::domain(OP, "tau_p must be shorter than the frame"));
        }
        if self.pilot_symbols() < 1 {
            return Err(NumericError::domain(OP, "tau_p*f_s must round to at least one pilot"));
        }
        Ok(())
    }

    /// Pilot symbol count `round(τ_p·f_s)`.
    pub fn pilot_symbols(&self) -> u64 {
        (self.tau_p * self.f_s).round().to_u64().unwrap_or(0)
    }

    /// Longest estimation time that leaves room for data.
    pub fn tau_max(&self) -> T {
        self.frame - self.tau_p * T::c(0.5)
    }

    /// Sample count `round(τ·f_s)` (at least 1) and the effective `τ` it
    /// corresponds to, for an estimation that must fit in the frame.
    pub fn samples(&self, tau: T) -> Result<(u64, T)> {
        if !(tau < self.tau_max()) {
            return Err(NumericError::domain(
                "samples",
                format!("tau must lie in (0, {}), got {tau}", self.tau_max()),
            ));
        }
        let (count, tau_eff) = self.sample_count(tau)?;
        if tau_eff >= self.tau_max() {
            return Err(NumericError::domain("samples", "rounded tau reaches the end of the frame"));
        }
        Ok((count, tau_eff))
    }

    /// Like [`samples`](Self::samples) without the frame limit, for
    /// quantities that depend on the estimator alone.
    pub fn sample_count(&self, tau: T) -> Result<(u64, T)> {
        if !(tau > T::zero() && tau.is_finite()) {
            return Err(NumericError::domain("samples", format!("tau must be positive, got {tau}")));
        }
        let n = (tau * self.f_s).round().max(T::one());
        let count = n
            .to_u64()
            .ok_or_else(|| NumericError::domain("samples", format!("tau*f_s = {n} out of range")))?;
        Ok((count, n / self.f_s))
    }

    /// Fraction of the frame left for data, `(T − τ − τ_p/2)/T`.
    pub fn prefactor(&self, tau: T) -> T {
        ((self.frame - tau - self.tau_p * T::c(0.5)) / self.frame).max(T::zero())
    }

    /// `|h_PR,ST|²` implied by `γ`.
    pub fn g_pr_st(&self) -> T {
        self.gamma * self.sigma2 / self.p_tx_pr
    }

    /// Interference-to-noise ratio at the SR, `|h_PT,SR|²·P_Tx,PT/σ²`.
    pub fn inr(&self) -> T {
        self.g_pt_sr * self.p_tx_pt / self.sigma2
    }

    /// `γ` above which the deterministic rule cannot reach `p_full` even
    /// with exact estimates: `θ_I·P_Tx,PR/(P_full·σ²)`.
    pub fn gamma_limit(&self) -> T {
        self.theta_i * self.p_tx_pr / (self.p_full * self.sigma2)
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_rho(mut self, rho_out: T) -> Self {
        self.rho_out = rho_out;
        self
    }
}

/// Nakagami-m laws of the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec<T> {
    pub pr_st: NakagamiGain<T>,
    pub pt_sr: NakagamiGain<T>,
    pub st_sr: NakagamiGain<T>,
}

impl<T: Real> FadingSpec<T> {
    /// Same `m` on every link, mean gains taken from `params`.
    pub fn symmetric(params: &ScenarioParams<T>, m: T) -> Result<Self> {
        Self::new(params, m, m, m)
    }

    pub fn new(params: &ScenarioParams<T>, m_pr_st: T, m_pt_sr: T, m_st_sr: T) -> Result<Self> {
        Ok(FadingSpec {
            pr_st: NakagamiGain::new(m_pr_st, params.g_pr_st())?,
            pt_sr: NakagamiGain::new(m_pt_sr, params.g_pt_sr)?,
            st_sr: NakagamiGain::new(m_st_sr, params.g_st_sr)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid() {
        let p = ScenarioParams::<f64>::default();
        p.validate().unwrap();
        assert_eq!(p.pilot_symbols(), 10);
        assert!((p.g_pr_st() - 1e-10).abs() < 1e-25);
        assert!((p.inr() - 1.0).abs() < 1e-12);
        assert!((p.gamma_limit() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn samples_round_to_integers() {
        let p = ScenarioParams::<f64>::default();
        assert_eq!(p.samples(1e-3).unwrap().0, 1000);
        let (n, t) = p.samples(1.23456e-3).unwrap();
        assert_eq!(n, 1235);
        assert!((t - 1.235e-3).abs() < 1e-15);
        assert_eq!(p.samples(1e-9).unwrap().0, 1);
        assert!(p.samples(0.0).is_err());
        assert!(p.samples(p.tau_max()).is_err());
        assert_eq!(p.sample_count(0.1).unwrap().0, 100_000);
        assert!(p.sample_count(-1.0).is_err());
    }

    #[test]
    fn invalid_parameters() {
        let base = ScenarioParams::<f64>::default();
        assert!(base.with_rho(0.0).validate().is_err());
        assert!(base.with_rho(1.0).validate().is_err());
        assert!(ScenarioParams { sigma2: -1.0, ..base }.validate().is_err());
        assert!(ScenarioParams { tau_p: 0.2, ..base }.validate().is_err());
        assert!(ScenarioParams { tau_p: 1e-7, ..base }.validate().is_err());
        assert!(base.with_gamma(-1.0).validate().is_err());
    }

    #[test]
    fn prefactor_vanishes_at_frame_end() {
        let p = ScenarioParams::<f64>::default();
        assert!(p.prefactor(p.tau_max()).abs() < 1e-15);
        assert!((p.prefactor(1e-3) - (0.1 - 1e-3 - 5e-6) / 0.1).abs() < 1e-15);
    }
}
