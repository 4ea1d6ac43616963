//! Frame-by-frame simulation of the raw signal models.
//!
//! Each trial draws the received-power estimate at the ST, applies the
//! power policy, records whether the estimate-based interference crosses
//! `θ_I`, draws the pilot and interference estimates at the SR and records
//! the estimated rate. Under fading the three gains are drawn first.
//!
//! Trials are grouped in chunks of [`CHUNK`]; chunk `c` uses stream `c` of
//! the seed, and chunk results are merged in chunk order with compensated
//! sums, so the summary does not depend on how chunks are scheduled.

use std::ops::Range;

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::dists::{rng_stream, NcChiSq};
use crate::error::Result;
use crate::power_control::{controlled_power_det, controlled_power_fading};
use crate::scenario::{FadingSpec, ScenarioParams};
use crate::specfun::Tolerance;
use crate::NumericError;

/// Trials per random stream.
pub const CHUNK: u64 = 8192;

/// Smallest accepted run.
pub const MIN_TRIALS: u64 = 1000;

/// How the ST picks its transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Outage-constrained power, computed once from the analytic rule of
    /// the channel model (deterministic or fading).
    Controlled,
    /// A fixed power in mW.
    FixedPower(f64),
}

/// One simulated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub p_hat_rx_st: f64,
    pub p_cont_used: f64,
    /// `max(P̂ − σ², 0)/P_Tx,PR · p`, the interference the ST believes it
    /// causes.
    pub interference_at_pr: f64,
    pub outage_event: bool,
    pub c_hat_s: f64,
    /// `(|h_PR,ST|², |h_PT,SR|², |h_ST,SR|²)` when fading is simulated.
    pub gains: Option<[f64; 3]>,
}

/// A sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − reference|` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.value - reference).abs() / self.se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub n_trials: u64,
    pub seed: u64,
    pub samples: u64,
    pub tau_eff: f64,
    /// Power used in every trial.
    pub p_cont: f64,
    pub outage_rate: Estimate,
    /// `prefactor · E[Ĉ]`.
    pub mean_throughput: Estimate,
    /// `E[Ĉ]`.
    pub mean_rate: Estimate,
    pub mean_p_hat: Estimate,
    /// Sorted draws of `P̂_Rx,ST`; their empirical CDF.
    pub p_hat_sorted: Vec<f64>,
    /// Sorted draws of `Ĉ`.
    pub c_hat_sorted: Vec<f64>,
}

/// Kolmogorov–Smirnov distance between the empirical law of `sorted` and a
/// model CDF given at the same points (`cdf[i] = F(sorted[i])`).
pub fn ks_statistic(sorted: &[f64], cdf: &[f64]) -> f64 {
    assert_eq!(sorted.len(), cdf.len());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // ties share one step of the empirical CDF
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let below = i as f64 / n;
        let above = (j + 1) as f64 / n;
        d = d.max((cdf[i] - below).abs()).max((above - cdf[i]).abs());
        i = j + 1;
    }
    d
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// First two moments about a fixed shift, so partial sums merge exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments {
    shift: f64,
    s1: CompensatedSum,
    s2: CompensatedSum,
}

impl Moments {
    fn new(shift: f64) -> Self {
        Moments {
            shift,
            s1: CompensatedSum::default(),
            s2: CompensatedSum::default(),
        }
    }

    fn push(&mut self, x: f64) {
        let d = x - self.shift;
        self.s1.add(d);
        self.s2.add(d * d);
    }

    fn merge(&mut self, other: &Moments) {
        debug_assert_eq!(self.shift, other.shift);
        self.s1.merge(&other.s1);
        self.s2.merge(&other.s2);
    }

    fn estimate(&self, n: u64) -> Estimate {
        let nf = n as f64;
        let m1 = self.s1.value() / nf;
        let var = if n > 1 {
            ((self.s2.value() - nf * m1 * m1) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: self.shift + m1,
            se: (var / nf).sqrt(),
        }
    }
}

/// Partial results over a range of chunks; merge in chunk order.
#[derive(Debug, Clone, PartialEq)]
pub struct McAccumulator {
    n: u64,
    outages: u64,
    rate: Moments,
    p_hat: Moments,
    p_hat_samples: Vec<f64>,
    c_hat_samples: Vec<f64>,
}

impl McAccumulator {
    fn new(sim: &FrameSimulator) -> Self {
        McAccumulator {
            n: 0,
            outages: 0,
            rate: Moments::new(sim.rate_shift),
            p_hat: Moments::new(sim.p_hat_shift),
            p_hat_samples: Vec::new(),
            c_hat_samples: Vec::new(),
        }
    }

    fn push(&mut self, rec: &TrialRecord) {
        self.n += 1;
        self.outages += rec.outage_event as u64;
        self.rate.push(rec.c_hat_s);
        self.p_hat.push(rec.p_hat_rx_st);
        self.p_hat_samples.push(rec.p_hat_rx_st);
        self.c_hat_samples.push(rec.c_hat_s);
    }

    /// Appends `later`, which must cover the chunks right after `self`.
    pub fn merge(mut self, later: McAccumulator) -> McAccumulator {
        self.n += later.n;
        self.outages += later.outages;
        self.rate.merge(&later.rate);
        self.p_hat.merge(&later.p_hat);
        self.p_hat_samples.extend(later.p_hat_samples);
        self.c_hat_samples.extend(later.c_hat_samples);
        self
    }

    pub fn trials(&self) -> u64 {
        self.n
    }
}

/// A fully resolved simulation set-up: parameters, sample counts and the
/// power every trial uses.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSimulator {
    params: ScenarioParams<f64>,
    fading: Option<FadingSpec<f64>>,
    samples: u64,
    pilots: u64,
    tau_eff: f64,
    power: f64,
    p_hat_shift: f64,
    rate_shift: f64,
}

impl FrameSimulator {
    /// Deterministic channels.
    pub fn det(params: &ScenarioParams<f64>, tau: f64, policy: Policy) -> Result<Self> {
        params.validate()?;
        let (samples, tau_eff) = params.samples(tau)?;
        let power = match policy {
            Policy::Controlled => controlled_power_det(params, tau, &Tolerance::default())?.p_cont,
            Policy::FixedPower(p) => check_power(p)?,
        };
        Ok(Self::build(params, None, samples, tau_eff, power))
    }

    /// Nakagami-m fading on all three links; the controlled power is the
    /// distribution-level rule, the same for every trial.
    pub fn fading(params: &ScenarioParams<f64>, fading: &FadingSpec<f64>, tau: f64, policy: Policy) -> Result<Self> {
        params.validate()?;
        let (samples, tau_eff) = params.samples(tau)?;
        let power = match policy {
            Policy::Controlled => controlled_power_fading(params, &fading.pr_st, tau, &Tolerance::default())?.p_cont,
            Policy::FixedPower(p) => check_power(p)?,
        };
        Ok(Self::build(params, Some(*fading), samples, tau_eff, power))
    }

    fn build(
        params: &ScenarioParams<f64>,
        fading: Option<FadingSpec<f64>>,
        samples: u64,
        tau_eff: f64,
        power: f64,
    ) -> Self {
        let (snr, inr, g_st) = match &fading {
            None => (params.gamma, params.inr(), params.g_st_sr),
            Some(f) => (
                f.pr_st.mean_gain() * params.p_tx_pr / params.sigma2,
                f.pt_sr.mean_gain() * params.p_tx_pt / params.sigma2,
                f.st_sr.mean_gain(),
            ),
        };
        FrameSimulator {
            params: *params,
            fading,
            samples,
            pilots: params.pilot_symbols(),
            tau_eff,
            power,
            p_hat_shift: params.sigma2 * (1.0 + snr),
            rate_shift: (g_st * power / (params.sigma2 * (1.0 + inr))).ln_1p() / std::f64::consts::LN_2,
        }
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn tau_eff(&self) -> f64 {
        self.tau_eff
    }

    /// Simulates one frame.
    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialRecord {
        let p = &self.params;
        let (g_pr, g_pt, g_st, gains) = match &self.fading {
            None => (p.g_pr_st(), p.g_pt_sr, p.g_st_sr, None),
            Some(f) => {
                let g_pr = f.pr_st.sample(rng);
                let g_pt = f.pt_sr.sample(rng);
                let g_st = f.st_sr.sample(rng);
                (g_pr, g_pt, g_st, Some([g_pr, g_pt, g_st]))
            }
        };
        let sigma2 = p.sigma2;
        let p_hat = NcChiSq::received_power(self.samples, g_pr * p.p_tx_pr / sigma2, sigma2)
            .expect("validated parameters")
            .sample(rng);
        let interference = (p_hat - sigma2).max(0.0) / p.p_tx_pr * self.power;
        let g_hat = NcChiSq::pilot_gain(self.pilots, g_st, sigma2)
            .expect("validated parameters")
            .sample(rng);
        let i_hat = NcChiSq::received_power(self.samples, g_pt * p.p_tx_pt / sigma2, sigma2)
            .expect("validated parameters")
            .sample(rng);
        TrialRecord {
            p_hat_rx_st: p_hat,
            p_cont_used: self.power,
            interference_at_pr: interference,
            outage_event: interference >= p.theta_i,
            c_hat_s: (g_hat * self.power / i_hat).ln_1p() / std::f64::consts::LN_2,
            gains,
        }
    }

    fn chunk(&self, seed: u64, chunk: u64, n_total: u64) -> McAccumulator {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(n_total);
        let mut rng = rng_stream(seed, chunk);
        let mut acc = McAccumulator::new(self);
        acc.p_hat_samples.reserve((end - start) as usize);
        acc.c_hat_samples.reserve((end - start) as usize);
        for _ in start..end {
            acc.push(&self.trial(&mut rng));
        }
        acc
    }

    /// Runs the chunks in `chunks` of an `n_total`-trial experiment.
    pub fn run_chunks(&self, seed: u64, chunks: Range<u64>, n_total: u64) -> McAccumulator {
        let parts: Vec<McAccumulator> = chunks
            .clone()
            .into_par_iter()
            .map(|c| self.chunk(seed, c, n_total))
            .collect();
        parts
            .into_iter()
            .fold(McAccumulator::new(self), McAccumulator::merge)
    }

    /// Number of chunks of an `n`-trial experiment.
    pub fn chunk_count(n: u64) -> u64 {
        n.div_ceil(CHUNK)
    }

    /// Runs `n` trials from `seed`.
    pub fn run(&self, n: u64, seed: u64) -> Result<McSummary> {
        if n < MIN_TRIALS {
            return Err(NumericError::domain(
                "run_trials",
                format!("need at least {MIN_TRIALS} trials, got {n}"),
            ));
        }
        let acc = self.run_chunks(seed, 0..Self::chunk_count(n), n);
        Ok(self.summarize(acc, seed))
    }

    /// Turns merged partial results into a summary.
    pub fn summarize(&self, acc: McAccumulator, seed: u64) -> McSummary {
        let n = acc.n;
        let nf = n as f64;
        let rate = acc.outages as f64 / nf;
        let mean_rate = acc.rate.estimate(n);
        let pre = self.params.prefactor(self.tau_eff);
        let mut p_hat_sorted = acc.p_hat_samples;
        let mut c_hat_sorted = acc.c_hat_samples;
        p_hat_sorted.sort_by(f64::total_cmp);
        c_hat_sorted.sort_by(f64::total_cmp);
        McSummary {
            n_trials: n,
            seed,
            samples: self.samples,
            tau_eff: self.tau_eff,
            p_cont: self.power,
            outage_rate: Estimate {
                value: rate,
                se: (rate * (1.0 - rate) / nf).sqrt(),
            },
            mean_throughput: Estimate {
                value: pre * mean_rate.value,
                se: pre * mean_rate.se,
            },
            mean_rate,
            mean_p_hat: acc.p_hat.estimate(n),
            p_hat_sorted,
            c_hat_sorted,
        }
    }
}

fn check_power(p: f64) -> Result<f64> {
    if p > 0.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(NumericError::domain("Policy::FixedPower", format!("power must be positive, got {p}")))
    }
}

/// Simulates `n` frames on deterministic channels.
pub fn run_trials_det(params: &ScenarioParams<f64>, tau: f64, policy: Policy, n: u64, seed: u64) -> Result<McSummary> {
    FrameSimulator::det(params, tau, policy)?.run(n, seed)
}

/// Simulates `n` frames with Nakagami-m fading on every link.
pub fn run_trials_fading(
    params: &ScenarioParams<f64>,
    fading: &FadingSpec<f64>,
    tau: f64,
    policy: Policy,
    n: u64,
    seed: u64,
) -> Result<McSummary> {
    FrameSimulator::fading(params, fading, tau, policy)?.run(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn ks_of_exact_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&xs, &xs);
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn ks_handles_ties() {
        let xs = [1.0, 1.0, 2.0, 2.0];
        let cdf = [0.25, 0.25, 0.75, 0.75];
        assert_eq!(ks_statistic(&xs, &cdf), 0.25);
    }

    #[test]
    fn rejects_tiny_runs_and_bad_power() {
        let p = ScenarioParams::default();
        assert!(run_trials_det(&p, 1e-3, Policy::Controlled, 10, 1).is_err());
        assert!(run_trials_det(&p, 1e-3, Policy::FixedPower(0.0), 2000, 1).is_err());
    }

    #[test]
    fn records_are_consistent() {
        let p = ScenarioParams::default();
        let sim = FrameSimulator::det(&p, 1e-4, Policy::Controlled).unwrap();
        let mut rng = rng_stream(3, 0);
        for _ in 0..1000 {
            let r = sim.trial(&mut rng);
            assert_eq!(r.outage_event, r.interference_at_pr >= p.theta_i);
            assert!(r.p_hat_rx_st >= 0.0 && r.interference_at_pr >= 0.0 && r.c_hat_s >= 0.0);
            assert!(r.gains.is_none());
        }
    }
}
