//! Scenario files in engineering units.
//!
//! This is the only place where dB, dBm, ms and MHz are turned into the
//! linear units of the core crate. Every section is optional and falls back
//! to the reference scenario, so an empty file is a valid configuration.

use serde::{Deserialize, Serialize};
use underlay_core::montecarlo::MIN_TRIALS;
use underlay_core::units::{db_to_lin, dbm_to_mw};
use underlay_core::validation::ValidationPlan;
use underlay_core::{FadingSpec, Scenario};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fading: Option<FadingConfig>,
    pub sweep: SweepConfig,
    pub mc: McConfig,
    pub validate: ValidateConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub f_s_mhz: f64,
    pub sigma2_dbm: f64,
    pub p_tx_pr_dbm: f64,
    pub p_tx_pt_dbm: f64,
    pub theta_i_dbm: f64,
    /// Linear probability in (0, 1).
    pub rho_out: f64,
    pub p_full_dbm: f64,
    pub frame_ms: f64,
    /// Pilot symbols per frame, `τ_p·f_s`.
    pub pilot_symbols: u64,
    pub gamma_db: f64,
    pub g_pt_sr_db: f64,
    pub g_st_sr_db: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            f_s_mhz: 1.0,
            sigma2_dbm: -100.0,
            p_tx_pr_dbm: 0.0,
            p_tx_pt_dbm: 0.0,
            theta_i_dbm: -110.0,
            rho_out: 0.1,
            p_full_dbm: 0.0,
            frame_ms: 100.0,
            pilot_symbols: 10,
            gamma_db: 0.0,
            g_pt_sr_db: -100.0,
            g_st_sr_db: -80.0,
        }
    }
}

impl ScenarioConfig {
    pub fn to_params(&self) -> Scenario {
        let f_s = self.f_s_mhz * 1e6;
        Scenario {
            f_s,
            sigma2: dbm_to_mw(self.sigma2_dbm),
            p_tx_pr: dbm_to_mw(self.p_tx_pr_dbm),
            p_tx_pt: dbm_to_mw(self.p_tx_pt_dbm),
            theta_i: dbm_to_mw(self.theta_i_dbm),
            rho_out: self.rho_out,
            p_full: dbm_to_mw(self.p_full_dbm),
            frame: self.frame_ms * 1e-3,
            tau_p: self.pilot_symbols as f64 / f_s,
            gamma: db_to_lin(self.gamma_db),
            g_pt_sr: db_to_lin(self.g_pt_sr_db),
            g_st_sr: db_to_lin(self.g_st_sr_db),
        }
    }
}

/// Nakagami-m fading. `m` applies to every link unless a per-link value is
/// given; mean gains default to the deterministic gains of `[scenario]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_pr_st: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_pt_sr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_st_sr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_pt_sr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_st_sr_db: Option<f64>,
}

impl FadingConfig {
    /// Scenario with the mean secondary gains substituted.
    pub fn apply_means(&self, params: &Scenario) -> Scenario {
        let mut p = *params;
        if let Some(db) = self.mean_pt_sr_db {
            p.g_pt_sr = db_to_lin(db);
        }
        if let Some(db) = self.mean_st_sr_db {
            p.g_st_sr = db_to_lin(db);
        }
        p
    }

    /// Per-link laws; `params` must already carry the mean gains.
    pub fn spec(&self, params: &Scenario) -> Result<FadingSpec, CliError> {
        FadingSpec::new(
            params,
            self.m_pr_st.unwrap_or(self.m),
            self.m_pt_sr.unwrap_or(self.m),
            self.m_st_sr.unwrap_or(self.m),
        )
        .map_err(|e| CliError::Config(format!("[fading] {e}")))
    }
}

/// A sweep axis: explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range(r) => {
                if r.points <= 1 {
                    return vec![r.from; r.points];
                }
                let steps = (r.points - 1) as f64;
                (0..r.points)
                    .map(|i| {
                        let t = i as f64 / steps;
                        match r.spacing {
                            Spacing::Linear => r.from + (r.to - r.from) * t,
                            Spacing::Log => (r.from.ln() + (r.to.ln() - r.from.ln()) * t).exp(),
                        }
                    })
                    .collect()
            }
        }
    }

    fn check(&self, name: &str) -> Result<Vec<f64>, CliError> {
        if let Axis::Range(r) = self {
            if r.spacing == Spacing::Log && !(r.from > 0.0 && r.to > 0.0) {
                return Err(CliError::Config(format!("[sweep] {name}: log spacing needs positive bounds")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::Config(format!("[sweep] {name}: empty axis")));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("[sweep] {name}: non-finite value {x}")));
        }
        Ok(v)
    }
}

/// Cartesian grid of the `sweep` command. An absent axis keeps the
/// scenario value (or the `[fading]` block for `m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub max_rows: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_ms: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_db: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_out: Option<Axis>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_rows: 1_000_000,
            tau_ms: Some(Axis::Values(vec![1.0])),
            gamma_db: None,
            m: None,
            rho_out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    /// Trials per check of `validate`.
    pub trials: u64,
    pub seed: u64,
    /// Trials per simulated point of the figure tables.
    pub figure_trials: u64,
    /// Figures simulate only estimation times up to this value.
    pub sim_tau_max_ms: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 100_000,
            seed: 20_240_601,
            figure_trials: 10_000,
            sim_tau_max_ms: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub tau_ref_ms: f64,
    pub taus_ms: Vec<f64>,
    pub rhos: Vec<f64>,
    pub fading_m: Vec<f64>,
    pub capacity_inr_db: Vec<f64>,
    pub capacity_taus_ms: Vec<f64>,
    pub estimator_gamma_db: f64,
    pub no_pc_gamma_db: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            tau_ref_ms: 1.0,
            taus_ms: vec![0.1, 1.0, 10.0],
            rhos: vec![0.01, 0.1],
            fading_m: vec![1.0, 5.0],
            capacity_inr_db: vec![-10.0, 0.0, 10.0],
            capacity_taus_ms: vec![0.1, 1.0, 10.0],
            estimator_gamma_db: 10.0,
            no_pc_gamma_db: -14.0,
        }
    }
}

impl Config {
    /// Parses `text`, applies `KEY=VALUE` overrides and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Config, CliError> {
        let cfg: Config = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
            for o in overrides {
                apply_override(&mut table, o)?;
            }
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    /// Resolved linear scenario.
    pub fn params(&self) -> Scenario {
        self.scenario.to_params()
    }

    /// Scenario with any `[fading]` mean gains applied.
    pub fn fading_params(&self) -> Scenario {
        match &self.fading {
            Some(f) => f.apply_means(&self.params()),
            None => self.params(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let params = self.params();
        params
            .validate()
            .map_err(|e| CliError::Config(format!("[scenario] {e}")))?;
        let tau_max_ms = params.tau_max() * 1e3;
        let in_frame = |name: &str, v: f64| {
            if v > 0.0 && v < tau_max_ms {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} = {v} must lie in (0, {tau_max_ms}) ms")))
            }
        };
        let valid_m = |name: &str, m: f64| {
            if m >= 0.5 && m.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} = {m}: Nakagami m must be finite and >= 0.5")))
            }
        };

        if let Some(f) = &self.fading {
            for (name, m) in [
                ("m", Some(f.m)),
                ("m_pr_st", f.m_pr_st),
                ("m_pt_sr", f.m_pt_sr),
                ("m_st_sr", f.m_st_sr),
            ] {
                if let Some(m) = m {
                    valid_m(&format!("[fading] {name}"), m)?;
                }
            }
            let p = f.apply_means(&params);
            p.validate().map_err(|e| CliError::Config(format!("[fading] {e}")))?;
        }

        let s = &self.sweep;
        if let Some(a) = &s.tau_ms {
            for v in a.check("tau_ms")? {
                in_frame("[sweep] tau_ms", v)?;
            }
        }
        if let Some(a) = &s.gamma_db {
            a.check("gamma_db")?;
        }
        if let Some(a) = &s.m {
            for m in a.check("m")? {
                valid_m("[sweep] m", m)?;
            }
        }
        if let Some(a) = &s.rho_out {
            for r in a.check("rho_out")? {
                if !(r > 0.0 && r < 1.0) {
                    return Err(CliError::Config(format!("[sweep] rho_out = {r} must lie in (0, 1)")));
                }
            }
        }

        let mc = &self.mc;
        for (name, n) in [("trials", mc.trials), ("figure_trials", mc.figure_trials)] {
            if n < MIN_TRIALS {
                return Err(CliError::Config(format!("[mc] {name} = {n} is below the minimum of {MIN_TRIALS}")));
            }
        }
        if !(mc.sim_tau_max_ms >= 0.0) {
            return Err(CliError::Config("[mc] sim_tau_max_ms must be >= 0".into()));
        }

        let v = &self.validate;
        in_frame("[validate] tau_ref_ms", v.tau_ref_ms)?;
        for (name, list) in [("taus_ms", &v.taus_ms), ("capacity_taus_ms", &v.capacity_taus_ms)] {
            if list.is_empty() {
                return Err(CliError::Config(format!("[validate] {name} is empty")));
            }
            for &t in list {
                in_frame(&format!("[validate] {name}"), t)?;
            }
        }
        for &r in &v.rhos {
            if !(r > 0.0 && r < 1.0) {
                return Err(CliError::Config(format!("[validate] rhos: {r} must lie in (0, 1)")));
            }
        }
        for &m in &v.fading_m {
            valid_m("[validate] fading_m", m)?;
        }
        for (name, x) in [
            ("estimator_gamma_db", v.estimator_gamma_db),
            ("no_pc_gamma_db", v.no_pc_gamma_db),
        ] {
            if !x.is_finite() {
                return Err(CliError::Config(format!("[validate] {name} must be finite")));
            }
        }
        if v.capacity_inr_db.is_empty() || v.capacity_inr_db.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("[validate] capacity_inr_db must be a non-empty list of finite values".into()));
        }
        Ok(())
    }

    pub fn plan(&self) -> ValidationPlan {
        let v = &self.validate;
        let ms = |t: &f64| t * 1e-3;
        ValidationPlan {
            trials: self.mc.trials,
            seed: self.mc.seed,
            taus: v.taus_ms.iter().map(ms).collect(),
            rhos: v.rhos.clone(),
            capacity_cases: v
                .capacity_inr_db
                .iter()
                .flat_map(|&inr| v.capacity_taus_ms.iter().map(move |t| (db_to_lin(inr), t * 1e-3)))
                .collect(),
            fading_m: v.fading_m.clone(),
            tau_ref: v.tau_ref_ms * 1e-3,
            estimator_gamma: db_to_lin(v.estimator_gamma_db),
            no_pc_gamma: db_to_lin(v.no_pc_gamma_db),
        }
    }
}

/// Sets `a.b.c = value` in `table`. The value is read as a TOML literal
/// and falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {assignment:?}")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key was just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set: malformed key {key:?}")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in path {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("--set: {p} in {key:?} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
