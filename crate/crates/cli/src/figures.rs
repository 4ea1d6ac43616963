//! Tables behind each figure.
//!
//! A figure starts from the configured scenario and overrides only what it
//! varies along its axes or fixes by definition; the overrides are listed
//! in the table notes. Simulated columns use `mc.figure_trials` trials per
//! point and are left empty above `mc.sim_tau_max_ms`.

use rayon::prelude::*;
use underlay_core::montecarlo::{FrameSimulator, McSummary, Policy};
use underlay_core::power_control::{
    controlled_power_det, controlled_power_fading, ideal_power_det, ideal_power_fading, perf_bound_det,
    perf_bound_fading, Regime,
};
use underlay_core::throughput::{
    capacity_dist, log_tau_grid, optimize_tradeoff, throughput_ideal_det, throughput_ideal_fading,
    throughput_no_pc_det, throughput_no_pc_fading, Model, NoPowerControl, TimeRegime,
};
use underlay_core::units::{db_to_lin, lin_to_db, mw_to_dbm};
use underlay_core::{FadingSpec, NumericError, Scenario, Tolerance, TradeoffCurve};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{exact, num, tau_ms, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum FigureId {
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6a,
    Fig6b,
    Fig7a,
    Fig7b,
    Fig8a,
    Fig8b,
    Fig9a,
    Fig9b,
}

impl FigureId {
    pub fn name(self) -> String {
        clap::ValueEnum::to_possible_value(&self)
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }

    /// Whether the table contains simulated columns.
    pub fn simulates(self) -> bool {
        matches!(self, FigureId::Fig4a | FigureId::Fig4b | FigureId::Fig6b | FigureId::Fig8b)
    }
}

/// Outage targets of the power and tradeoff figures.
pub const FIGURE_RHOS: [f64; 2] = [0.01, 0.1];
/// Nakagami parameters of the fading tradeoff figures.
pub const FIGURE_M: [f64; 2] = [1.0, 5.0];
/// Nakagami parameters of the fading bound figure.
pub const BOUND_M: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

pub fn build(id: FigureId, cfg: &Config) -> Result<Table, CliError> {
    match id {
        FigureId::Fig3 => fig3(cfg),
        FigureId::Fig4a => fig4(cfg, false),
        FigureId::Fig4b => fig4(cfg, true),
        FigureId::Fig5 => fig5(cfg),
        FigureId::Fig6a => fig6a(cfg),
        FigureId::Fig6b => fig6b(cfg),
        FigureId::Fig7a => fig7(cfg, -100.0),
        FigureId::Fig7b => fig7(cfg, -90.0),
        FigureId::Fig8a => fig8a(cfg),
        FigureId::Fig8b => fig8b(cfg),
        FigureId::Fig9a => fig9(cfg, -100.0),
        FigureId::Fig9b => fig9(cfg, -90.0),
    }
}

pub fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::InterferenceLimited => "interference_limited",
        Regime::PowerLimited => "power_limited",
    }
}

pub fn time_regime_name(r: TimeRegime) -> &'static str {
    match r {
        TimeRegime::EstimationDominant => "estimation_dominant",
        TimeRegime::ChannelDominant => "channel_dominant",
    }
}

/// `γ*` in dB; `-inf` when every `γ` is interference limited.
pub fn gamma_star_cell(r: Result<f64, NumericError>) -> Result<String, CliError> {
    match r {
        Ok(g) => Ok(num(lin_to_db(g))),
        Err(NumericError::NoRoot { .. }) => Ok(num(f64::NEG_INFINITY)),
        Err(e) => Err(e.into()),
    }
}

/// `n` log-spaced estimation times over `[lo_ms, hi_ms]`, snapped to the
/// sample lattice, deduplicated and kept inside the frame.
pub fn lattice_grid(params: &Scenario, lo_ms: f64, hi_ms: f64, n: usize) -> Vec<f64> {
    let mut counts: Vec<u64> = log_tau_grid(lo_ms * 1e-3, hi_ms * 1e-3, n)
        .into_iter()
        .map(|t| (t * params.f_s).round().max(1.0) as u64)
        .collect();
    counts.dedup();
    counts
        .into_iter()
        .map(|c| c as f64 / params.f_s)
        .filter(|&t| t < params.tau_max())
        .collect()
}

/// Search grid for `τ̃`: `n` points over [0.01, 50] ms plus the forced time
/// of the full-power baseline, so both are compared on a common domain.
/// Below ~10 samples the estimated-rate law is dominated by the heavy lower
/// tail of the interference estimate and is not a useful design point.
pub fn optimum_grid(params: &Scenario, forced: Option<f64>, n: usize) -> Vec<f64> {
    let mut grid = lattice_grid(params, 0.01, 50.0, n);
    if let Some(t) = forced {
        let t = samples_of(params, t) as f64 / params.f_s;
        if !grid.contains(&t) {
            grid.push(t);
            grid.sort_by(f64::total_cmp);
        }
    }
    grid
}

fn samples_of(params: &Scenario, tau: f64) -> u64 {
    (tau * params.f_s).round().max(1.0) as u64
}

fn m_cell(m: Option<f64>) -> String {
    m.map_or_else(|| num(f64::INFINITY), exact)
}

fn optimum_cells(params: &Scenario, curve: &TradeoffCurve) -> [String; 2] {
    [num(curve.r_s_opt), tau_ms(samples_of(params, curve.tau_opt), params.f_s)]
}

fn no_pc_cells(params: &Scenario, base: &NoPowerControl<f64>) -> [String; 2] {
    [
        num(base.r_s),
        base.tau_forced
            .map_or_else(String::new, |t| tau_ms(samples_of(params, t), params.f_s)),
    ]
}

fn seed_for(cfg: &Config, index: usize) -> u64 {
    cfg.mc.seed.wrapping_add(index as u64)
}

fn simulate(cfg: &Config, sim: Result<FrameSimulator, NumericError>, index: usize) -> Result<McSummary, CliError> {
    Ok(sim?.run(cfg.mc.figure_trials, seed_for(cfg, index))?)
}

fn fig3(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.params();
    let tol = Tolerance::default();
    let taus: Vec<f64> = (1..=200)
        .map(|k| k as f64 / 10.0)
        .chain((3..=10).map(|k| k as f64 * 10.0))
        .collect();
    let mut t = Table::new(&["tau_ms", "gamma_star_db"]);
    t.notes.push("gamma_star_db = -inf: interference limited for every gamma".into());
    t.rows = taus
        .par_iter()
        .map(|&ms| Ok(vec![exact(ms), gamma_star_cell(perf_bound_det(&params, ms * 1e-3, &tol))?]))
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fig4(cfg: &Config, panel_b: bool) -> Result<Table, CliError> {
    const GAMMA_DB: f64 = 10.0;
    const POINTS: usize = 101;
    let base = cfg.params().with_gamma(db_to_lin(GAMMA_DB));
    let tol = Tolerance::default();
    let power = base.p_full;
    let cases: [(f64, f64); 3] = if panel_b {
        [(0.0, 0.1), (0.0, 1.0), (0.0, 10.0)]
    } else {
        [(-10.0, 1.0), (0.0, 1.0), (10.0, 1.0)]
    };
    let mut t = Table::new(&["inr_db", "tau_ms", "rate", "cdf_an", "cdf_sim"]);
    t.notes.push(format!(
        "figure settings: gamma_db = {GAMMA_DB}, fixed transmit power p_full_dbm = {}",
        exact(cfg.scenario.p_full_dbm)
    ));
    let blocks = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(inr_db, ms))| -> Result<Vec<Vec<String>>, CliError> {
            let q = Scenario {
                g_pt_sr: db_to_lin(inr_db) * base.sigma2 / base.p_tx_pt,
                ..base
            };
            let (n, _) = q.samples(ms * 1e-3)?;
            let d = capacity_dist(&q, n, q.g_st_sr, q.g_pt_sr, power)?;
            let lo = d.quantile(1e-3, &tol)?;
            let hi = d.quantile(1.0 - 1e-3, &tol)?;
            let xs: Vec<f64> = (0..POINTS)
                .map(|k| lo + (hi - lo) * k as f64 / (POINTS - 1) as f64)
                .collect();
            let cdf = d.cdf_many(&xs, &tol)?;
            let s = simulate(cfg, FrameSimulator::det(&q, ms * 1e-3, Policy::FixedPower(power)), i)?;
            let total = s.c_hat_sorted.len() as f64;
            Ok(xs
                .iter()
                .zip(&cdf)
                .map(|(&x, &c)| {
                    let below = s.c_hat_sorted.partition_point(|&v| v <= x) as f64;
                    vec![exact(inr_db), tau_ms(n, q.f_s), num(x), num(c), num(below / total)]
                })
                .collect())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    t.rows = blocks.into_iter().flatten().collect();
    Ok(t)
}

fn fig5(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.params();
    let tol = Tolerance::default();
    let taus: Vec<f64> = (1..=10)
        .map(|k| k as f64 / 10.0)
        .chain((3..=40).map(|k| k as f64 * 0.5))
        .collect();
    let mut ms_list: Vec<Option<f64>> = BOUND_M.iter().copied().map(Some).collect();
    ms_list.push(None);
    let jobs: Vec<(Option<f64>, f64)> = ms_list
        .iter()
        .flat_map(|&m| taus.iter().map(move |&t| (m, t)))
        .collect();
    let mut t = Table::new(&["m", "tau_ms", "gamma_star_db"]);
    t.notes.push("m = inf: deterministic channel".into());
    t.rows = jobs
        .par_iter()
        .map(|&(m, ms)| {
            let g = match m {
                Some(m) => perf_bound_fading(&params, m, ms * 1e-3, &tol),
                None => perf_bound_det(&params, ms * 1e-3, &tol),
            };
            Ok(vec![m_cell(m), exact(ms), gamma_star_cell(g)?])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fig6a(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.params();
    let tol = Tolerance::default();
    let grid = lattice_grid(&params, 0.01, 10.0, 40);
    let ideal = mw_to_dbm(ideal_power_det(&params));
    let jobs: Vec<(f64, f64)> = FIGURE_RHOS
        .iter()
        .flat_map(|&r| grid.iter().map(move |&t| (r, t)))
        .collect();
    let mut t = Table::new(&["rho_out", "tau_ms", "p_cont_dbm_EM", "regime", "p_cont_dbm_IM"]);
    t.rows = jobs
        .par_iter()
        .map(|&(rho, tau)| {
            let q = params.with_rho(rho);
            let pc = controlled_power_det(&q, tau, &tol)?;
            Ok(vec![
                exact(rho),
                tau_ms(pc.samples, q.f_s),
                num(mw_to_dbm(pc.p_cont)),
                regime_name(pc.regime).into(),
                num(ideal),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fig6b(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.params();
    let tol = Tolerance::default();
    let grid = lattice_grid(&params, 0.01, 10.0, 40);
    let ideal = throughput_ideal_det(&params);
    let mut t = Table::new(&["rho_out", "tau_ms", "rs_EM", "rs_IM", "rs_sim", "time_regime"]);
    let curves = FIGURE_RHOS
        .par_iter()
        .map(|&rho| optimize_tradeoff(Model::EstimationModel, &params.with_rho(rho), None, &grid, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    for (&rho, c) in FIGURE_RHOS.iter().zip(&curves) {
        let [r, tau] = optimum_cells(&params, c);
        t.notes.push(format!("optimum rho_out = {rho}: tau_opt_ms = {tau}, rs_opt = {r}"));
    }
    let jobs: Vec<(usize, usize)> = (0..FIGURE_RHOS.len())
        .flat_map(|i| (0..grid.len()).map(move |k| (i, k)))
        .collect();
    t.rows = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(i, k))| {
            let q = params.with_rho(FIGURE_RHOS[i]);
            let (tau, rs) = curves[i].points[k];
            let sim = if tau * 1e3 <= cfg.mc.sim_tau_max_ms {
                num(simulate(cfg, FrameSimulator::det(&q, tau, Policy::Controlled), idx)?.mean_throughput.value)
            } else {
                String::new()
            };
            Ok(vec![
                exact(q.rho_out),
                tau_ms(samples_of(&q, tau), q.f_s),
                num(rs),
                num(ideal),
                sim,
                time_regime_name(curves[i].regime_at(tau)).into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn gamma_axis() -> Vec<f64> {
    (-20..=10).map(f64::from).collect()
}

fn fig7(cfg: &Config, g_pt_sr_db: f64) -> Result<Table, CliError> {
    const P_FULL_DBM: [f64; 2] = [-10.0, 0.0];
    let base = Scenario {
        g_pt_sr: db_to_lin(g_pt_sr_db),
        ..cfg.params()
    };
    let tol = Tolerance::default();
    let mut t = Table::new(&[
        "gamma_db",
        "p_full_dbm",
        "rs_opt_EM",
        "tau_opt_ms",
        "rs_IM",
        "rs_no_pc",
        "tau_forced_ms",
    ]);
    t.notes.push(format!("figure settings: g_pt_sr_db = {g_pt_sr_db}"));
    let jobs: Vec<(f64, f64)> = P_FULL_DBM
        .iter()
        .flat_map(|&p| gamma_axis().into_iter().map(move |g| (p, g)))
        .collect();
    t.rows = jobs
        .par_iter()
        .map(|&(p_dbm, g_db)| {
            let q = Scenario {
                p_full: db_to_lin(p_dbm),
                gamma: db_to_lin(g_db),
                ..base
            };
            let base_np = throughput_no_pc_det(&q, &tol)?;
            let grid = optimum_grid(&q, base_np.tau_forced, 40);
            let curve = optimize_tradeoff(Model::EstimationModel, &q, None, &grid, &tol)?;
            let [r, tau] = optimum_cells(&q, &curve);
            let [rn, tn] = no_pc_cells(&q, &base_np);
            Ok(vec![exact(g_db), exact(p_dbm), r, tau, num(throughput_ideal_det(&q)), rn, tn])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fading_spec(params: &Scenario, m: f64) -> Result<FadingSpec, CliError> {
    FadingSpec::symmetric(params, m).map_err(CliError::from)
}

fn fig8a(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.fading_params();
    let tol = Tolerance::default();
    let grid = lattice_grid(&params, 0.01, 10.0, 30);
    let mut t = Table::new(&["m", "tau_ms", "p_cont_dbm_EM", "regime", "p_cont_dbm_IM"]);
    let jobs: Vec<(f64, f64)> = FIGURE_M
        .iter()
        .flat_map(|&m| grid.iter().map(move |&t| (m, t)))
        .collect();
    t.rows = jobs
        .par_iter()
        .map(|&(m, tau)| {
            let spec = fading_spec(&params, m)?;
            let pc = controlled_power_fading(&params, &spec.pr_st, tau, &tol)?;
            let ideal = ideal_power_fading(&params, &spec.pr_st, &tol)?;
            Ok(vec![
                exact(m),
                tau_ms(pc.samples, params.f_s),
                num(mw_to_dbm(pc.p_cont)),
                regime_name(pc.regime).into(),
                num(mw_to_dbm(ideal)),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fig8b(cfg: &Config) -> Result<Table, CliError> {
    let params = cfg.fading_params();
    let tol = Tolerance::default();
    let grid = lattice_grid(&params, 0.01, 10.0, 30);
    let mut t = Table::new(&["m", "tau_ms", "rs_EM", "rs_IM", "rs_sim", "time_regime"]);
    let specs = FIGURE_M
        .iter()
        .map(|&m| fading_spec(&params, m))
        .collect::<Result<Vec<_>, _>>()?;
    let curves = specs
        .par_iter()
        .map(|s| optimize_tradeoff(Model::EstimationModel, &params, Some(s), &grid, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    let ideals = specs
        .par_iter()
        .map(|s| throughput_ideal_fading(&params, s, &tol))
        .collect::<Result<Vec<_>, _>>()?;
    for (&m, c) in FIGURE_M.iter().zip(&curves) {
        let [r, tau] = optimum_cells(&params, c);
        t.notes.push(format!("optimum m = {m}: tau_opt_ms = {tau}, rs_opt = {r}"));
    }
    let jobs: Vec<(usize, usize)> = (0..FIGURE_M.len())
        .flat_map(|i| (0..grid.len()).map(move |k| (i, k)))
        .collect();
    t.rows = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(i, k))| {
            let (tau, rs) = curves[i].points[k];
            let sim = if tau * 1e3 <= cfg.mc.sim_tau_max_ms {
                let s = simulate(cfg, FrameSimulator::fading(&params, &specs[i], tau, Policy::Controlled), idx)?;
                num(s.mean_throughput.value)
            } else {
                String::new()
            };
            Ok(vec![
                exact(FIGURE_M[i]),
                tau_ms(samples_of(&params, tau), params.f_s),
                num(rs),
                num(ideals[i]),
                sim,
                time_regime_name(curves[i].regime_at(tau)).into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}

fn fig9(cfg: &Config, g_pt_sr_db: f64) -> Result<Table, CliError> {
    let base = Scenario {
        g_pt_sr: db_to_lin(g_pt_sr_db),
        ..cfg.fading_params()
    };
    let tol = Tolerance::default();
    let mut t = Table::new(&[
        "gamma_db",
        "m",
        "rs_opt_EM",
        "tau_opt_ms",
        "rs_IM",
        "rs_no_pc",
        "tau_forced_ms",
    ]);
    t.notes.push(format!("figure settings: mean g_pt_sr_db = {g_pt_sr_db}"));
    let jobs: Vec<(f64, f64)> = FIGURE_M
        .iter()
        .flat_map(|&m| gamma_axis().into_iter().map(move |g| (m, g)))
        .collect();
    t.rows = jobs
        .par_iter()
        .map(|&(m, g_db)| {
            let q = base.with_gamma(db_to_lin(g_db));
            let spec = fading_spec(&q, m)?;
            let base_np = throughput_no_pc_fading(&q, &spec, &tol)?;
            let grid = optimum_grid(&q, base_np.tau_forced, 25);
            let curve = optimize_tradeoff(Model::EstimationModel, &q, Some(&spec), &grid, &tol)?;
            let [r, tau] = optimum_cells(&q, &curve);
            let [rn, tn] = no_pc_cells(&q, &base_np);
            Ok(vec![
                exact(g_db),
                exact(m),
                r,
                tau,
                num(throughput_ideal_fading(&q, &spec, &tol)?),
                rn,
                tn,
            ])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(t)
}
