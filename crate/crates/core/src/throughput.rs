//! Secondary throughput `R_s(τ)` and the estimation-throughput tradeoff.
//!
//! `R_s(τ) = (T − τ − τ_p/2)/T · E[Ĉ]`, with the expectation taken over
//! the estimated rate law and, under fading, over the secondary gains.

use rayon::prelude::*;

use crate::dists::{gamma_match, CapacityDist, NcChiSq};
use crate::error::Result;
use crate::power_control::{
    controlled_power_det, controlled_power_fading, ideal_power_det, ideal_power_fading, outage_det, outage_fading,
};
use crate::scenario::{FadingSpec, ScenarioParams};
use crate::specfun::{gamma_rule, golden_section_max, GaussRule, Tolerance};
use crate::{NumericError, Real};

/// Gauss nodes per gain dimension of the fading expectation.
pub const FADING_NODES: usize = 48;

/// Refinement target for the optimal estimation time, seconds.
pub const TAU_RESOLUTION: f64 = 1e-6;

/// Which system the throughput refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Estimated channels with outage-constrained power control.
    EstimationModel,
    /// Perfect channel knowledge, no estimation time.
    IdealModel,
    /// Estimated channels, always at full power; `τ` is forced by the
    /// outage constraint.
    NoPowerControl,
}

/// Which effect dominates the throughput slope at a given `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeRegime {
    /// `τ < τ̃`: more estimation still pays.
    EstimationDominant,
    /// `τ ≥ τ̃`: the lost data time dominates.
    ChannelDominant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve<T> {
    /// `(τ, R_s(τ))` in ascending `τ`.
    pub points: Vec<(T, T)>,
    pub tau_opt: T,
    pub r_s_opt: T,
    pub model: Model,
}

impl<T: Real> TradeoffCurve<T> {
    pub fn regime_at(&self, tau: T) -> TimeRegime {
        if tau < self.tau_opt {
            TimeRegime::EstimationDominant
        } else {
            TimeRegime::ChannelDominant
        }
    }

    /// True when the discrete differences of `r_s` change sign at most
    /// once, from rising to falling. Differences within `flat` of zero are
    /// ignored.
    pub fn is_unimodal(&self, flat: T) -> bool {
        let mut falling = false;
        for w in self.points.windows(2) {
            let d = w[1].1 - w[0].1;
            if d > flat {
                if falling {
                    return false;
                }
            } else if d < -flat {
                falling = true;
            }
        }
        true
    }
}

/// Result of the no-power-control baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoPowerControl<T> {
    /// Shortest estimation time meeting the outage constraint at full
    /// power, if any.
    pub tau_forced: Option<T>,
    pub r_s: T,
}

/// Law of the estimated rate for `samples` interference-estimation samples
/// with the given true gains and transmit power.
pub fn capacity_dist<T: Real>(
    params: &ScenarioParams<T>,
    samples: u64,
    g_st_sr: T,
    g_pt_sr: T,
    p: T,
) -> Result<CapacityDist<T>> {
    let gain = gamma_match(&NcChiSq::pilot_gain(params.pilot_symbols(), g_st_sr, params.sigma2)?);
    let inr = g_pt_sr * params.p_tx_pt / params.sigma2;
    let interf = gamma_match(&NcChiSq::received_power(samples, inr, params.sigma2)?);
    CapacityDist::new(gain, interf, p)
}

fn mean_rate_det<T: Real>(params: &ScenarioParams<T>, samples: u64, p: T, tol: &Tolerance<T>) -> Result<T> {
    capacity_dist(params, samples, params.g_st_sr, params.g_pt_sr, p)?.mean(tol)
}

/// `R_s(τ)` on a deterministic channel with controlled power.
pub fn throughput_det<T: Real>(params: &ScenarioParams<T>, tau: T, tol: &Tolerance<T>) -> Result<T> {
    let pc = controlled_power_det(params, tau, tol)?;
    let mean = mean_rate_det(params, pc.samples, pc.p_cont, tol)?;
    Ok(params.prefactor(pc.tau_eff) * mean)
}

/// Rate with perfect channel knowledge on a deterministic channel. No
/// estimation time is spent, so no prefactor applies.
pub fn throughput_ideal_det<T: Real>(params: &ScenarioParams<T>) -> T {
    let p = ideal_power_det(params);
    let sinr = params.g_st_sr * p / (params.g_pt_sr * params.p_tx_pt + params.sigma2);
    sinr.ln_1p() / T::LN_2()
}

/// Smallest sample count whose full-power outage meets the target, by
/// bisection on the monotone outage.
fn forced_samples<T: Real, F>(params: &ScenarioParams<T>, mut outage: F) -> Result<Option<u64>>
where
    F: FnMut(u64) -> Result<T>,
{
    let mut hi = (params.tau_max() * params.f_s).floor().to_u64().unwrap_or(0);
    while hi > 0 && T::from_count(hi) / params.f_s >= params.tau_max() {
        hi -= 1;
    }
    if hi < 1 || outage(hi)? > params.rho_out {
        return Ok(None);
    }
    if outage(1)? <= params.rho_out {
        return Ok(Some(1));
    }
    let mut lo = 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if outage(mid)? <= params.rho_out {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Baseline that always transmits at `p_full`: the estimation time is the
/// shortest one that satisfies the outage constraint at full power, and
/// the throughput is zero when no such time exists within the frame.
pub fn throughput_no_pc_det<T: Real>(params: &ScenarioParams<T>, tol: &Tolerance<T>) -> Result<NoPowerControl<T>> {
    params.validate()?;
    let Some(n) = forced_samples(params, |n| outage_det(params, n, params.p_full))? else {
        return Ok(NoPowerControl {
            tau_forced: None,
            r_s: T::zero(),
        });
    };
    let tau = T::from_count(n) / params.f_s;
    let mean = mean_rate_det(params, n, params.p_full, tol)?;
    Ok(NoPowerControl {
        tau_forced: Some(tau),
        r_s: params.prefactor(tau) * mean,
    })
}

fn secondary_rules<T: Real>(fading: &FadingSpec<T>) -> Result<(GaussRule<T>, GaussRule<T>)> {
    rules_with(fading, FADING_NODES)
}

fn rules_with<T: Real>(fading: &FadingSpec<T>, nodes: usize) -> Result<(GaussRule<T>, GaussRule<T>)> {
    let st = gamma_rule(fading.st_sr.m(), nodes)?.scaled(fading.st_sr.scale());
    let pt = gamma_rule(fading.pt_sr.m(), nodes)?.scaled(fading.pt_sr.scale());
    Ok((st, pt))
}

// E over both secondary gains of `f(g_st_sr, g_pt_sr)`.
fn expect_gains<T: Real, F>(st: &GaussRule<T>, pt: &GaussRule<T>, f: F) -> Result<T>
where
    F: Fn(T, T) -> Result<T> + Sync,
{
    let rows: Vec<Result<T>> = st
        .nodes
        .par_iter()
        .zip(st.weights.par_iter())
        .map(|(&g_st, &w_st)| {
            let mut acc = T::zero();
            for (&g_pt, &w_pt) in pt.nodes.iter().zip(&pt.weights) {
                acc += w_pt * f(g_st, g_pt)?;
            }
            Ok(w_st * acc)
        })
        .collect();
    let mut total = T::zero();
    for r in rows {
        total += r?;
    }
    Ok(total)
}

fn mean_rate_fading<T: Real>(
    params: &ScenarioParams<T>,
    fading: &FadingSpec<T>,
    samples: u64,
    p: T,
    nodes: usize,
    tol: &Tolerance<T>,
) -> Result<T> {
    let (st, pt) = rules_with(fading, nodes)?;
    expect_gains(&st, &pt, |g_st, g_pt| {
        capacity_dist(params, samples, g_st, g_pt, p)?.mean(tol)
    })
}

/// `R_s(τ)` under Nakagami-m fading on all three links, with the
/// distribution-level controlled power.
pub fn throughput_fading<T: Real>(
    params: &ScenarioParams<T>,
    fading: &FadingSpec<T>,
    tau: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    throughput_fading_with_nodes(params, fading, tau, FADING_NODES, tol)
}

/// [`throughput_fading`] with an explicit Gauss rule size per dimension.
pub fn throughput_fading_with_nodes<T: Real>(
    params: &ScenarioParams<T>,
    fading: &FadingSpec<T>,
    tau: T,
    nodes: usize,
    tol: &Tolerance<T>,
) -> Result<T> {
    let pc = controlled_power_fading(params, &fading.pr_st, tau, tol)?;
    let mean = mean_rate_fading(params, fading, pc.samples, pc.p_cont, nodes, tol)?;
    Ok(params.prefactor(pc.tau_eff) * mean)
}

/// Ideal-model rate averaged over the fading of the secondary links, with
/// the ideal fading power rule.
pub fn throughput_ideal_fading<T: Real>(
    params: &ScenarioParams<T>,
    fading: &FadingSpec<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    let p = ideal_power_fading(params, &fading.pr_st, tol)?;
    let (st, pt) = secondary_rules(fading)?;
    expect_gains(&st, &pt, |g_st, g_pt| {
        let sinr = g_st * p / (g_pt * params.p_tx_pt + params.sigma2);
        Ok(sinr.ln_1p() / T::LN_2())
    })
}

/// No-power-control baseline under fading.
pub fn throughput_no_pc_fading<T: Real>(
    params: &ScenarioParams<T>,
    fading: &FadingSpec<T>,
    tol: &Tolerance<T>,
) -> Result<NoPowerControl<T>> {
    params.validate()?;
    let Some(n) = forced_samples(params, |n| outage_fading(params, &fading.pr_st, n, params.p_full, tol))? else {
        return Ok(NoPowerControl {
            tau_forced: None,
            r_s: T::zero(),
        });
    };
    let tau = T::from_count(n) / params.f_s;
    let mean = mean_rate_fading(params, fading, n, params.p_full, FADING_NODES, tol)?;
    Ok(NoPowerControl {
        tau_forced: Some(tau),
        r_s: params.prefactor(tau) * mean,
    })
}

/// `n ≥ 2` log-spaced estimation times over `[lo, hi]`.
pub fn log_tau_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let steps = T::from_count((n.max(2) - 1) as u64);
    (0..n.max(2))
        .map(|i| (a + (b - a) * T::from_count(i as u64) / steps).exp())
        .collect()
}

/// Evaluates `R_s` of `model` on `tau_grid` and refines the maximum by
/// golden-section search between the neighbours of the best grid point,
/// down to a `τ` resolution of one microsecond.
///
/// `tau_grid` must be ascending, inside `(0, T − τ_p/2)` and have at least
/// 20 points. `fading = None` selects the deterministic channel.
pub fn optimize_tradeoff<T: Real>(
    model: Model,
    params: &ScenarioParams<T>,
    fading: Option<&FadingSpec<T>>,
    tau_grid: &[T],
    tol: &Tolerance<T>,
) -> Result<TradeoffCurve<T>> {
    const OP: &str = "optimize_tradeoff";
    params.validate()?;
    if tau_grid.len() < 20 {
        return Err(NumericError::domain(OP, format!("need at least 20 grid points, got {}", tau_grid.len())));
    }
    if tau_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(NumericError::domain(OP, "tau grid must be strictly ascending"));
    }
    if !(tau_grid[0] > T::zero() && tau_grid[tau_grid.len() - 1] < params.tau_max()) {
        return Err(NumericError::domain(OP, "tau grid must lie inside (0, T - tau_p/2)"));
    }

    match model {
        Model::IdealModel => {
            let r = match fading {
                None => throughput_ideal_det(params),
                Some(f) => throughput_ideal_fading(params, f, tol)?,
            };
            Ok(TradeoffCurve {
                points: tau_grid.iter().map(|&t| (t, r)).collect(),
                tau_opt: tau_grid[0],
                r_s_opt: r,
                model,
            })
        }
        Model::NoPowerControl => {
            let base = match fading {
                None => throughput_no_pc_det(params, tol)?,
                Some(f) => throughput_no_pc_fading(params, f, tol)?,
            };
            let points = tau_grid
                .iter()
                .map(|&t| Ok((t, no_pc_at(params, fading, t, tol)?)))
                .collect::<Result<Vec<_>>>()?;
            let tau_opt = base.tau_forced.unwrap_or(tau_grid[0]);
            Ok(TradeoffCurve {
                points,
                tau_opt,
                r_s_opt: base.r_s,
                model,
            })
        }
        Model::EstimationModel => {
            let eval = |t: T| -> Result<T> {
                match fading {
                    None => throughput_det(params, t, tol),
                    Some(f) => throughput_fading(params, f, t, tol),
                }
            };
            let points = tau_grid
                .iter()
                .map(|&t| Ok((t, eval(t)?)))
                .collect::<Result<Vec<_>>>()?;
            let best = points
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).expect("finite throughput"))
                .map(|(i, _)| i)
                .expect("non-empty grid");
            let lo = if best == 0 { tau_grid[0] } else { tau_grid[best - 1] };
            let hi = tau_grid[(best + 1).min(tau_grid.len() - 1)];

            let mut failure = None;
            let ext = golden_section_max(
                |t| match eval(t) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::neg_infinity()
                    }
                },
                lo,
                hi,
                T::c(TAU_RESOLUTION),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let (mut tau_opt, mut r_s_opt) = if ext.value >= points[best].1 {
                (ext.x, ext.value)
            } else {
                points[best]
            };
            // R_s only sees τ through the sample count, so the optimum is a
            // lattice point; check the ones next to the golden-section result.
            let n0 = (ext.x * params.f_s).round();
            for k in -2i32..=2 {
                let t = (n0 + T::c(k as f64)) / params.f_s;
                if !(t >= lo && t <= hi) {
                    continue;
                }
                let r = eval(t)?;
                if r > r_s_opt {
                    tau_opt = t;
                    r_s_opt = r;
                }
            }
            Ok(TradeoffCurve {
                points,
                tau_opt,
                r_s_opt,
                model,
            })
        }
    }
}

// Full-power throughput at `tau`, zero where the outage target is missed.
fn no_pc_at<T: Real>(params: &ScenarioParams<T>, fading: Option<&FadingSpec<T>>, tau: T, tol: &Tolerance<T>) -> Result<T> {
    let (n, tau_eff) = params.samples(tau)?;
    let pre = params.prefactor(tau_eff);
    match fading {
        None => {
            if outage_det(params, n, params.p_full)? > params.rho_out {
                return Ok(T::zero());
            }
            Ok(pre * mean_rate_det(params, n, params.p_full, tol)?)
        }
        Some(f) => {
            if outage_fading(params, &f.pr_st, n, params.p_full, tol)? > params.rho_out {
                return Ok(T::zero());
            }
            Ok(pre * mean_rate_fading(params, f, n, params.p_full, FADING_NODES, tol)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ScenarioParams<f64> {
        ScenarioParams::default()
    }

    #[test]
    fn ideal_rate_is_log2_six() {
        assert!((throughput_ideal_det(&reference()) - 6f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn ideal_rate_without_primary_interference() {
        let p = ScenarioParams {
            g_pt_sr: 0.0,
            ..reference()
        };
        let want = (1.0 + p.g_st_sr * 0.1 / p.sigma2).log2();
        assert!((throughput_ideal_det(&p) - want).abs() < 1e-12);
    }

    #[test]
    fn estimation_stays_below_ideal() {
        let p = reference();
        let tol = Tolerance::default();
        let im = throughput_ideal_det(&p);
        for tau in [1e-4, 1e-3, 1e-2, 5e-2] {
            let r = throughput_det(&p, tau, &tol).unwrap();
            assert!(r > 0.0 && r < im, "tau={tau}: {r}");
        }
        let end = throughput_det(&p, p.tau_max() - 2e-6, &tol).unwrap();
        assert!(end < 1e-3, "{end}");
    }

    #[test]
    fn grid_shape() {
        let g = log_tau_grid(1e-4_f64, 1e-2, 3);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn optimizer_rejects_bad_grids() {
        let p = reference();
        let tol = Tolerance::default();
        let short = log_tau_grid(1e-4, 1e-2, 5);
        assert!(optimize_tradeoff(Model::EstimationModel, &p, None, &short, &tol).is_err());
        let outside = log_tau_grid(1e-4, 0.2, 25);
        assert!(optimize_tradeoff(Model::EstimationModel, &p, None, &outside, &tol).is_err());
    }

    #[test]
    fn no_pc_vanishes_above_the_bound() {
        let p = reference().with_gamma(0.5);
        let r = throughput_no_pc_det(&p, &Tolerance::default()).unwrap();
        assert_eq!(r.tau_forced, None);
        assert_eq!(r.r_s, 0.0);
    }

    #[test]
    fn unimodality_check() {
        let c = |v: &[f64]| TradeoffCurve {
            points: v.iter().enumerate().map(|(i, &r)| (i as f64, r)).collect(),
            tau_opt: 0.0,
            r_s_opt: 0.0,
            model: Model::EstimationModel,
        };
        assert!(c(&[1.0, 2.0, 3.0, 2.0, 1.0]).is_unimodal(0.0));
        assert!(!c(&[1.0, 2.0, 1.0, 2.0, 1.0]).is_unimodal(0.0));
        assert!(c(&[1.0, 1.0, 1.0]).is_unimodal(0.0));
    }
}
