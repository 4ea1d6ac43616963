//! Analytic-versus-simulation check suite.
//!
//! Every check compares a closed-form or quadrature result against either
//! an exact identity or a Monte Carlo run of the signal models, and carries
//! the measured discrepancy next to the bound it must respect.

use crate::dists::{gamma_match, NcChiSq};
use crate::error::Result;
use crate::montecarlo::{ks_statistic, FrameSimulator, McSummary, Policy};
use crate::power_control::{
    controlled_power_det, outage_det, outage_fading, perf_bound_det, perf_bound_fading, Regime,
};
use crate::scenario::{FadingSpec, ScenarioParams};
use crate::specfun::Tolerance;
use crate::throughput::{capacity_dist, throughput_det, throughput_fading, throughput_no_pc_det};
use crate::NumericError;

/// Maximum KS distance between an analytic CDF and 10⁵ simulated draws.
pub const KS_BOUND: f64 = 0.02;
/// Allowed deviation of the simulated outage from the target, deterministic channel.
pub const OUTAGE_BAND_DET: f64 = 0.015;
/// Allowed deviation of the simulated outage from the target under fading.
pub const OUTAGE_BAND_FADING: f64 = 0.02;
/// Allowed distance between analytic and simulated means, in standard errors.
pub const Z_BOUND: f64 = 3.0;

/// What to run. Times in seconds, ratios linear.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationPlan {
    pub trials: u64,
    pub seed: u64,
    /// Estimation times of the outage and throughput checks.
    pub taus: Vec<f64>,
    /// Outage targets of the deterministic calibration.
    pub rhos: Vec<f64>,
    /// `(interference-to-noise ratio, τ)` pairs of the rate-law checks.
    pub capacity_cases: Vec<(f64, f64)>,
    /// Nakagami parameters of the fading checks.
    pub fading_m: Vec<f64>,
    /// Estimation time of the single-point checks.
    pub tau_ref: f64,
    /// `γ` of the estimator-law check.
    pub estimator_gamma: f64,
    /// `γ` of the full-power baseline check.
    pub no_pc_gamma: f64,
}

impl Default for ValidationPlan {
    fn default() -> Self {
        ValidationPlan {
            trials: 100_000,
            seed: 20_240_601,
            taus: vec![1e-4, 1e-3, 1e-2],
            rhos: vec![0.01, 0.1],
            capacity_cases: [0.1, 1.0, 10.0]
                .iter()
                .flat_map(|&inr| [1e-4, 1e-3, 1e-2].map(|tau| (inr, tau)))
                .collect(),
            fading_m: vec![1.0, 5.0],
            tau_ref: 1e-3,
            estimator_gamma: 10.0,
            no_pc_gamma: 10f64.powf(-1.4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: String, measured: f64, bound: f64, detail: String) -> Self {
        CheckResult {
            name,
            passed: measured <= bound,
            measured,
            bound,
            detail,
        }
    }
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<40} measured={:.6e} bound={:.3e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound,
            self.detail
        )
    }
}

fn ms(tau: f64) -> f64 {
    tau * 1e3
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

// `None` when full power breaks the outage target for every `γ`.
fn boundary(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(g) => Ok(Some(g)),
        Err(NumericError::NoRoot { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn no_boundary(name: String) -> CheckResult {
    CheckResult {
        name,
        passed: true,
        measured: 0.0,
        bound: 0.0,
        detail: "no regime boundary: interference limited for every gamma".into(),
    }
}

/// Runs the whole suite. A numerical failure aborts it; a check that runs
/// but misses its bound is reported with `passed = false`.
pub fn run_validation(params: &ScenarioParams<f64>, plan: &ValidationPlan) -> Result<Vec<CheckResult>> {
    params.validate()?;
    let tol = Tolerance::default();
    let mut out = Vec::new();
    let n = plan.trials;
    let mut seed = plan.seed;
    let mut next_seed = || {
        seed = seed.wrapping_add(1);
        seed
    };

    // Regime boundary residuals.
    let (samples, _) = params.samples(plan.tau_ref)?;
    let name = format!("bound_residual_det[tau={}ms]", ms(plan.tau_ref));
    match boundary(perf_bound_det(params, plan.tau_ref, &tol))? {
        Some(g) => {
            let res = (outage_det(&params.with_gamma(g), samples, params.p_full)? - params.rho_out).abs();
            out.push(CheckResult::at_most(name, res, 1e-8, format!("gamma*={:.4} dB", db(g))));
        }
        None => out.push(no_boundary(name)),
    }
    for &m in &plan.fading_m {
        let name = format!("bound_residual_fading[m={m}]");
        let Some(g) = boundary(perf_bound_fading(params, m, plan.tau_ref, &tol))? else {
            out.push(no_boundary(name));
            continue;
        };
        let q = params.with_gamma(g);
        let spec = FadingSpec::symmetric(&q, m)?;
        let res = (outage_fading(&q, &spec.pr_st, samples, params.p_full, &tol)? - params.rho_out).abs();
        out.push(CheckResult::at_most(name, res, 1e-6, format!("gamma*={:.4} dB", db(g))));
    }

    // Estimator law against exact draws.
    let q = params.with_gamma(plan.estimator_gamma);
    let s = FrameSimulator::det(&q, plan.tau_ref, Policy::FixedPower(params.p_full))?.run(n, next_seed())?;
    let approx = gamma_match(&NcChiSq::received_power(s.samples, q.gamma, q.sigma2)?);
    let cdf = s
        .p_hat_sorted
        .iter()
        .map(|&x| approx.cdf(x.max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    out.push(CheckResult::at_most(
        format!("estimator_ks[gamma={:.1}dB,tau={}ms]", db(q.gamma), ms(plan.tau_ref)),
        ks_statistic(&s.p_hat_sorted, &cdf),
        KS_BOUND,
        format!("{} draws", s.n_trials),
    ));

    // Noise-only estimate.
    let q = params.with_gamma(0.0);
    let s = FrameSimulator::det(&q, plan.tau_ref, Policy::FixedPower(params.p_full))?.run(n, next_seed())?;
    out.push(CheckResult::at_most(
        "noise_only_mean_power".to_string(),
        s.mean_p_hat.z_score(params.sigma2),
        Z_BOUND,
        format!("mean {:.6e} mW vs sigma2 {:.6e} mW (z-score)", s.mean_p_hat.value, params.sigma2),
    ));

    // Outage calibration of the controlled power.
    for &rho in &plan.rhos {
        let q = params.with_rho(rho);
        for &tau in &plan.taus {
            let pc = controlled_power_det(&q, tau, &tol)?;
            let analytic = outage_det(&q, pc.samples, pc.p_cont)?;
            if pc.regime == Regime::InterferenceLimited {
                out.push(CheckResult::at_most(
                    format!("power_self_consistency[rho={rho},tau={}ms]", ms(tau)),
                    (analytic - rho).abs(),
                    1e-8,
                    "analytic outage at the controlled power".to_string(),
                ));
            }
            let s = FrameSimulator::det(&q, tau, Policy::Controlled)?.run(n, next_seed())?;
            out.push(outage_check(
                format!("outage_det[rho={rho},tau={}ms]", ms(tau)),
                &s,
                rho,
                OUTAGE_BAND_DET,
                pc.regime,
            ));
        }
    }

    // Estimated-rate law: normalization, CDF and mean.
    for &(inr, tau) in &plan.capacity_cases {
        let q = ScenarioParams {
            g_pt_sr: inr * params.sigma2 / params.p_tx_pt,
            ..*params
        };
        let label = format!("inr={:.1}dB,tau={}ms", db(inr), ms(tau));
        let s = FrameSimulator::det(&q, tau, Policy::FixedPower(q.p_full))?.run(n, next_seed())?;
        let d = capacity_dist(&q, s.samples, q.g_st_sr, q.g_pt_sr, q.p_full)?;
        out.push(CheckResult::at_most(
            format!("rate_pdf_mass[{label}]"),
            (d.total_mass(&tol)? - 1.0).abs(),
            1e-6,
            "|integral - 1|".to_string(),
        ));
        let cdf = d.cdf_many(&s.c_hat_sorted, &tol)?;
        out.push(CheckResult::at_most(
            format!("rate_ks[{label}]"),
            ks_statistic(&s.c_hat_sorted, &cdf),
            KS_BOUND,
            format!("{} draws", s.n_trials),
        ));
        let mean = d.mean(&tol)?;
        out.push(CheckResult::at_most(
            format!("rate_mean[{label}]"),
            s.mean_rate.z_score(mean),
            Z_BOUND,
            format!("analytic {mean:.5} vs simulated {:.5} ± {:.5}", s.mean_rate.value, s.mean_rate.se),
        ));
    }

    // End-to-end throughput, deterministic channel.
    let analytic = throughput_det(params, plan.tau_ref, &tol)?;
    let s = FrameSimulator::det(params, plan.tau_ref, Policy::Controlled)?.run(n, next_seed())?;
    out.push(throughput_check(
        format!("throughput_det[tau={}ms]", ms(plan.tau_ref)),
        &s,
        analytic,
    ));

    // Full-power baseline: the forced estimation time must keep the outage.
    let q = params.with_gamma(plan.no_pc_gamma);
    let base = throughput_no_pc_det(&q, &tol)?;
    let (tau, note) = match base.tau_forced {
        Some(t) => (t, format!("forced tau {:.3} ms", ms(t))),
        None => {
            let t = plan.taus.iter().copied().fold(plan.tau_ref, f64::max);
            (t, format!("no feasible tau, simulated at {:.3} ms", ms(t)))
        }
    };
    let s = FrameSimulator::det(&q, tau, Policy::FixedPower(q.p_full))?.run(n, next_seed())?;
    out.push(CheckResult::at_most(
        format!("full_power_outage[gamma={:.1}dB]", db(q.gamma)),
        s.outage_rate.value,
        q.rho_out + OUTAGE_BAND_DET,
        format!("{note}, target {}", q.rho_out),
    ));

    // Fading: outage of the distribution-level power and throughput.
    for &m in &plan.fading_m {
        let spec = FadingSpec::symmetric(params, m)?;
        let sim = FrameSimulator::fading(params, &spec, plan.tau_ref, Policy::Controlled)?;
        let s = sim.run(n, next_seed())?;
        out.push(outage_check(
            format!("outage_fading[m={m},tau={}ms]", ms(plan.tau_ref)),
            &s,
            params.rho_out,
            OUTAGE_BAND_FADING,
            Regime::InterferenceLimited,
        ));
        for &tau in &plan.taus {
            let analytic = throughput_fading(params, &spec, tau, &tol)?;
            let s = if tau == plan.tau_ref {
                s.clone()
            } else {
                FrameSimulator::fading(params, &spec, tau, Policy::Controlled)?.run(n, next_seed())?
            };
            out.push(throughput_check(format!("throughput_fading[m={m},tau={}ms]", ms(tau)), &s, analytic));
        }
    }

    Ok(out)
}

fn outage_check(name: String, s: &McSummary, rho: f64, band: f64, regime: Regime) -> CheckResult {
    let v = s.outage_rate.value;
    match regime {
        Regime::InterferenceLimited => CheckResult::at_most(
            name,
            (v - rho).abs(),
            band,
            format!("simulated outage {v:.4} ± {:.4}, target {rho}", s.outage_rate.se),
        ),
        Regime::PowerLimited => CheckResult::at_most(
            name,
            (v - rho).max(0.0),
            band,
            format!("power limited; simulated outage {v:.4} must not exceed {rho}"),
        ),
    }
}

fn throughput_check(name: String, s: &McSummary, analytic: f64) -> CheckResult {
    CheckResult::at_most(
        name,
        s.mean_throughput.z_score(analytic),
        Z_BOUND,
        format!(
            "analytic {analytic:.5} vs simulated {:.5} ± {:.5}",
            s.mean_throughput.value, s.mean_throughput.se
        ),
    )
}
