//! Outage-constrained transmit power and the regime boundary `γ*`.
//!
//! The ST sets its power from the estimate `P̂` of the received primary
//! power so that `P((P̂ − σ²)/P_Tx,PR · p ≥ θ_I) ≤ ρ_out`. With a
//! deterministic PR–ST channel that is a quantile of one estimator law;
//! under Nakagami-m fading the estimator law is averaged over the gain.

use std::cell::RefCell;

use crate::dists::{gamma_match, GammaApprox, NakagamiGain, NcChiSq};
use crate::error::Result;
use crate::scenario::ScenarioParams;
use crate::specfun::{find_root, integrate_with_points, inv_reg_upper_gamma, ln_gamma, Tolerance};
use crate::{NumericError, Real};

/// Which limit binds the ST transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    InterferenceLimited,
    PowerLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControlResult<T> {
    /// Transmit power in mW, `0 < p_cont ≤ p_full`.
    pub p_cont: T,
    pub regime: Regime,
    /// Samples actually used, `round(τ·f_s)`.
    pub samples: u64,
    /// `samples / f_s`.
    pub tau_eff: T,
}

impl<T: Real> PowerControlResult<T> {
    fn capped(params: &ScenarioParams<T>, p_unc: T, samples: u64, tau_eff: T) -> Self {
        let (p_cont, regime) = if p_unc.is_nan() || p_unc >= params.p_full {
            (params.p_full, Regime::PowerLimited)
        } else {
            (p_unc, Regime::InterferenceLimited)
        };
        PowerControlResult {
            p_cont,
            regime,
            samples,
            tau_eff,
        }
    }
}

/// Gamma stand-in for the received-power estimate at SNR `snr`.
pub fn received_power_approx<T: Real>(samples: u64, snr: T, sigma2: T) -> Result<GammaApprox<T>> {
    Ok(gamma_match(&NcChiSq::received_power(samples, snr, sigma2)?))
}

// Estimate level at which the interference reaches θ_I when sending `p`.
fn threshold<T: Real>(params: &ScenarioParams<T>, p: T) -> T {
    params.theta_i * params.p_tx_pr / p + params.sigma2
}

/// Probability that transmitting `p` breaks the interference constraint on
/// a deterministic channel, using the Gamma stand-in of the estimator.
pub fn outage_det<T: Real>(params: &ScenarioParams<T>, samples: u64, p: T) -> Result<T> {
    let approx = received_power_approx(samples, params.gamma, params.sigma2)?;
    approx.sf(threshold(params, p))
}

/// Controlled power for a deterministic PR–ST channel.
///
/// The constraint is met with equality at the `(1 − ρ_out)` quantile `q` of
/// the estimator: `p = θ_I·P_Tx,PR/(q − σ²)`, capped at `p_full`. When
/// `q ≤ σ²` the constraint cannot bind and the result is `p_full`.
pub fn controlled_power_det<T: Real>(
    params: &ScenarioParams<T>,
    tau: T,
    tol: &Tolerance<T>,
) -> Result<PowerControlResult<T>> {
    params.validate()?;
    let (samples, tau_eff) = params.samples(tau)?;
    let approx = received_power_approx(samples, params.gamma, params.sigma2)?;
    let q = approx.upper_quantile(params.rho_out, &tol.tight())?;
    let denom = q - params.sigma2;
    if denom <= T::zero() {
        return Ok(PowerControlResult::capped(params, T::infinity(), samples, tau_eff));
    }
    let p_unc = params.theta_i * params.p_tx_pr / denom;
    Ok(PowerControlResult::capped(params, p_unc, samples, tau_eff))
}

/// Power rule with perfect knowledge of `|h_PR,ST|²`: `min(θ_I/|h|², p_full)`.
pub fn ideal_power_det<T: Real>(params: &ScenarioParams<T>) -> T {
    let g = params.g_pr_st();
    if g <= T::zero() {
        params.p_full
    } else {
        (params.theta_i / g).min(params.p_full)
    }
}

/// Power rule with perfect knowledge of each gain realization but a
/// power chosen once for the fading law: `P(|h|²·p ≥ θ_I) = ρ_out`.
pub fn ideal_power_fading<T: Real>(
    params: &ScenarioParams<T>,
    pr_st: &NakagamiGain<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    let v = inv_reg_upper_gamma(params.rho_out, pr_st.m(), &tol.tight())?;
    Ok((params.theta_i / (pr_st.scale() * v)).min(params.p_full))
}

fn gamma_db<T: Real>(db: T) -> T {
    T::c(10.0).powf(db / T::c(10.0))
}

// γ* search range, 1e-6 ..= 1e3 in dB.
const GAMMA_LO_DB: f64 = -60.0;
const GAMMA_HI_DB: f64 = 30.0;

/// Solves `g(γ) = ρ_out` for `γ` in dB over the bracket, where `g` is
/// increasing. Failures inside `g` are carried out of the root finder.
fn solve_gamma_db<T: Real, G>(op: &'static str, mut g: G, rho: T, tol: &Tolerance<T>) -> Result<T>
where
    G: FnMut(T) -> Result<T>,
{
    let lo = T::c(GAMMA_LO_DB);
    let hi = T::c(GAMMA_HI_DB);
    let g_lo = g(lo)? - rho;
    let g_hi = g(hi)? - rho;
    if g_lo > T::zero() || g_hi < T::zero() {
        return Err(NumericError::NoRoot {
            op,
            detail: format!(
                "outage at full power minus target is {:e} at {GAMMA_LO_DB} dB and {:e} at {GAMMA_HI_DB} dB",
                g_lo.as_f64(),
                g_hi.as_f64()
            ),
        });
    }
    let mut failure = None;
    let root = find_root(
        |db| match g(db) {
            Ok(v) => v - rho,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        lo,
        hi,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => root.map(gamma_db),
    }
}

/// Performance bound `γ*`: the `γ` at which the controlled power of a
/// deterministic channel equals `p_full`. Below it the link is power
/// limited, above it interference limited. Linear scale.
///
/// `τ` is not limited by the frame, since `γ*` depends on the estimator
/// alone. Fails with [`NumericError::NoRoot`] when the outage target is not
/// reached anywhere in `γ ∈ [1e-6, 1e3]`, e.g. for very short `τ`.
pub fn perf_bound_det<T: Real>(params: &ScenarioParams<T>, tau: T, tol: &Tolerance<T>) -> Result<T> {
    params.validate()?;
    let (samples, _) = params.sample_count(tau)?;
    solve_gamma_db(
        "perf_bound_det",
        |db| outage_det(&params.with_gamma(gamma_db(db)), samples, params.p_full),
        params.rho_out,
        &tol.tight(),
    )
}

// Lower and upper tail mass left out of the fading integral.
const FADING_TAIL: f64 = 1e-8;

/// Outage probability under Nakagami-m fading of the PR–ST link when
/// sending `p`: the estimator survival at the interference threshold,
/// averaged over the gain law.
pub fn outage_fading<T: Real>(
    params: &ScenarioParams<T>,
    pr_st: &NakagamiGain<T>,
    samples: u64,
    p: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    let m = pr_st.m();
    let scale = pr_st.scale();
    let thr = threshold(params, p);
    let snr_per_v = scale * params.p_tx_pr / params.sigma2;
    // Conditional outage at normalized gain v = |h|²/scale.
    let cond = |v: T| -> Result<T> {
        let approx = received_power_approx(samples, v * snr_per_v, params.sigma2)?;
        approx.sf(thr)
    };

    let tail = T::c(FADING_TAIL);
    let v_lo = inv_reg_upper_gamma(T::one() - tail, m, tol)?;
    let v_hi = inv_reg_upper_gamma(tail, m, tol)?;

    // The conditional outage steps up where the mean estimate crosses the
    // threshold; its width is one estimator standard deviation.
    let v_t = params.theta_i / (p * scale);
    let snr_t = v_t * snr_per_v;
    let n = T::from_count(samples);
    let dv = (T::c(2.0) + T::c(4.0) * snr_t).sqrt() / (n.sqrt() * snr_per_v);
    let mut knots = Vec::with_capacity(16);
    for k in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        knots.push(v_t + T::c(k) * dv);
    }
    for k in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
        knots.push(m + T::c(k) * m.sqrt());
    }

    let failure = RefCell::new(None);
    let eval = |v: T| match cond(v) {
        Ok(q) => q,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::zero()
        }
    };

    let ln_gm = ln_gamma(m);
    let body = if m >= T::one() {
        let f = |v: T| {
            let ln_w = (m - T::one()) * v.ln() - v - ln_gm;
            let q = eval(v);
            q * ln_w.exp()
        };
        integrate_with_points(f, v_lo, v_hi, &knots, tol)?
    } else {
        // w = v^m removes the v^{m−1} singularity at the origin.
        let inv_m = m.recip();
        let ln_gm1 = ln_gamma(m + T::one());
        let f = |w: T| {
            let v = w.powf(inv_m);
            let q = eval(v);
            q * (-v - ln_gm1).exp()
        };
        let knots_w: Vec<T> = knots.iter().filter(|k| **k > T::zero()).map(|k| k.powf(m)).collect();
        integrate_with_points(f, v_lo.powf(m), v_hi.powf(m), &knots_w, tol)?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // The upper tail sits where the conditional outage is flat.
    let upper = tail * cond(v_hi)?;
    Ok((body.value + upper).max(T::zero()).min(T::one()))
}

/// Controlled power under Nakagami-m fading of the PR–ST link: the largest
/// `p ≤ p_full` whose fading-averaged outage is `ρ_out`. The root is
/// searched in `ln p`.
pub fn controlled_power_fading<T: Real>(
    params: &ScenarioParams<T>,
    pr_st: &NakagamiGain<T>,
    tau: T,
    tol: &Tolerance<T>,
) -> Result<PowerControlResult<T>> {
    const OP: &str = "controlled_power_fading";
    params.validate()?;
    let (samples, tau_eff) = params.samples(tau)?;
    let rho = params.rho_out;
    let inner = Tolerance {
        abs_tol: tol.abs_tol.min(T::c(1e-10)),
        ..*tol
    };
    let out = |lnp: T| outage_fading(params, pr_st, samples, lnp.exp(), &inner);

    let hi = params.p_full.ln();
    if out(hi)? <= rho {
        return Ok(PowerControlResult::capped(params, params.p_full, samples, tau_eff));
    }
    let step = T::c(10.0).ln() * T::c(2.0);
    let mut lo = hi - step;
    let mut tries = 0;
    while out(lo)? > rho {
        lo -= step;
        tries += 1;
        if tries > 30 {
            return Err(NumericError::NoRoot {
                op: OP,
                detail: format!("outage stays above {rho} down to p = {:e} mW", lo.exp().as_f64()),
            });
        }
    }
    let mut failure = None;
    let lnp = find_root(
        |x| match out(x) {
            Ok(v) => v - rho,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        lo,
        hi,
        &tol.tight(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PowerControlResult::capped(params, lnp?.exp(), samples, tau_eff))
}

/// Fading counterpart of [`perf_bound_det`]: the mean `γ` at which the
/// controlled power reaches `p_full` when the PR–ST link has Nakagami
/// parameter `m`. Linear scale.
pub fn perf_bound_fading<T: Real>(params: &ScenarioParams<T>, m: T, tau: T, tol: &Tolerance<T>) -> Result<T> {
    params.validate()?;
    let (samples, _) = params.sample_count(tau)?;
    let inner = Tolerance {
        abs_tol: tol.abs_tol.min(T::c(1e-11)),
        ..*tol
    };
    solve_gamma_db(
        "perf_bound_fading",
        |db| {
            let p = params.with_gamma(gamma_db(db));
            let spec = NakagamiGain::new(m, p.g_pr_st())?;
            outage_fading(&p, &spec, samples, params.p_full, &inner)
        },
        params.rho_out,
        tol,
    )
}
