//! Cartesian sweeps over `ρ_out × γ × m × τ`, `τ` varying fastest.

use rayon::prelude::*;
use underlay_core::power_control::{controlled_power_det, controlled_power_fading, perf_bound_det, perf_bound_fading};
use underlay_core::throughput::{
    throughput_det, throughput_fading, throughput_ideal_det, throughput_ideal_fading, throughput_no_pc_det,
    throughput_no_pc_fading,
};
use underlay_core::units::{db_to_lin, mw_to_dbm};
use underlay_core::{FadingSpec, Tolerance};

use crate::config::Config;
use crate::error::CliError;
use crate::figures::{gamma_star_cell, regime_name};
use crate::output::{exact, num, tau_ms, Table};

pub const COLUMNS: [&str; 12] = [
    "rho_out",
    "gamma_db",
    "m",
    "tau_ms",
    "samples",
    "p_cont_dbm",
    "regime",
    "gamma_star_db",
    "rs_EM",
    "rs_IM",
    "rs_no_pc",
    "tau_forced_ms",
];

// Channel model of one sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Channel {
    Deterministic,
    /// Every link uses this `m`.
    Symmetric(f64),
    /// The `[fading]` block as configured.
    Configured,
}

/// Evaluates the configured grid. Rows keep grid order whatever the
/// execution schedule.
pub fn run(cfg: &Config) -> Result<Table, CliError> {
    let s = &cfg.sweep;
    let rhos = s
        .rho_out
        .as_ref()
        .map_or_else(|| vec![cfg.scenario.rho_out], |a| a.values());
    let gammas = s
        .gamma_db
        .as_ref()
        .map_or_else(|| vec![cfg.scenario.gamma_db], |a| a.values());
    let channels: Vec<Channel> = match (&s.m, &cfg.fading) {
        (Some(a), _) => a.values().into_iter().map(Channel::Symmetric).collect(),
        (None, Some(_)) => vec![Channel::Configured],
        (None, None) => vec![Channel::Deterministic],
    };
    let taus = s.tau_ms.as_ref().map_or_else(|| vec![1.0], |a| a.values());

    let rows = [rhos.len(), gammas.len(), channels.len(), taus.len()]
        .iter()
        .try_fold(1u64, |acc, &n| acc.checked_mul(n as u64))
        .unwrap_or(u64::MAX);
    if rows == 0 {
        return Err(CliError::Config("[sweep] empty grid axis".into()));
    }
    if rows > s.max_rows {
        return Err(CliError::Config(format!(
            "[sweep] grid has {rows} rows, above max_rows = {}",
            s.max_rows
        )));
    }

    let mut jobs = Vec::with_capacity(rows as usize);
    for &rho in &rhos {
        for &g in &gammas {
            for &c in &channels {
                for &t in &taus {
                    jobs.push((rho, g, c, t));
                }
            }
        }
    }
    let mut table = Table::new(&COLUMNS);
    table.notes.push("m = inf: deterministic channel".into());
    table.rows = jobs
        .par_iter()
        .map(|&(rho, g, c, t)| row(cfg, rho, g, c, t))
        .collect::<Result<_, _>>()?;
    Ok(table)
}

fn row(cfg: &Config, rho: f64, gamma_db: f64, channel: Channel, tau_in_ms: f64) -> Result<Vec<String>, CliError> {
    let tol = Tolerance::default();
    let tau = tau_in_ms * 1e-3;
    let head = |m: String, samples: u64, f_s: f64| {
        vec![exact(rho), exact(gamma_db), m, tau_ms(samples, f_s), samples.to_string()]
    };
    let mut cells = match channel {
        Channel::Deterministic => {
            let p = cfg.params().with_rho(rho).with_gamma(db_to_lin(gamma_db));
            let pc = controlled_power_det(&p, tau, &tol)?;
            let np = throughput_no_pc_det(&p, &tol)?;
            let mut v = head(num(f64::INFINITY), pc.samples, p.f_s);
            v.extend([
                num(mw_to_dbm(pc.p_cont)),
                regime_name(pc.regime).into(),
                gamma_star_cell(perf_bound_det(&p, tau, &tol))?,
                num(throughput_det(&p, tau, &tol)?),
                num(throughput_ideal_det(&p)),
                num(np.r_s),
            ]);
            (v, np.tau_forced, p.f_s)
        }
        Channel::Symmetric(_) | Channel::Configured => {
            let p = cfg.fading_params().with_rho(rho).with_gamma(db_to_lin(gamma_db));
            let (spec, m_label) = match (channel, &cfg.fading) {
                (Channel::Symmetric(m), _) => (FadingSpec::symmetric(&p, m)?, exact(m)),
                (_, Some(f)) => (f.spec(&p)?, exact(f.m)),
                _ => unreachable!("configured channel requires a fading block"),
            };
            let pc = controlled_power_fading(&p, &spec.pr_st, tau, &tol)?;
            let np = throughput_no_pc_fading(&p, &spec, &tol)?;
            let mut v = head(m_label, pc.samples, p.f_s);
            v.extend([
                num(mw_to_dbm(pc.p_cont)),
                regime_name(pc.regime).into(),
                gamma_star_cell(perf_bound_fading(&p, spec.pr_st.m(), tau, &tol))?,
                num(throughput_fading(&p, &spec, tau, &tol)?),
                num(throughput_ideal_fading(&p, &spec, &tol)?),
                num(np.r_s),
            ]);
            (v, np.tau_forced, p.f_s)
        }
    };
    let forced = cells
        .1
        .map_or_else(String::new, |t| tau_ms((t * cells.2).round() as u64, cells.2));
    cells.0.push(forced);
    Ok(cells.0)
}
