use rand_distr::Distribution;
use underlay_core::dists::{estimator_cdf, gamma_match, nakagami_gain_cdf, rng_stream};
use underlay_core::montecarlo::ks_statistic;
use underlay_core::throughput::capacity_dist;
use underlay_core::{CapacityDist, GammaApprox, NakagamiGain, NcChiSq, Scenario, Tolerance};

const DRAWS: usize = 40_000;

fn sorted_draws<D: Distribution<f64>>(d: &D, n: usize, stream: u64) -> Vec<f64> {
    let mut rng = rng_stream(7, stream);
    let mut v: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn gamma_stand_in_matches_exact_received_power_law() {
    let sigma2 = 1e-10;
    let mut stream = 0;
    for gamma_db in [-10.0, 0.0, 10.0] {
        let snr = 10f64.powf(gamma_db / 10.0);
        for dof in [100, 1000, 10_000] {
            let law = NcChiSq::received_power(dof, snr, sigma2).unwrap();
            let approx = gamma_match(&law);
            let xs = sorted_draws(&law, DRAWS, stream);
            stream += 1;
            let cdf: Vec<f64> = xs.iter().map(|&x| estimator_cdf(&approx, x).unwrap()).collect();
            let d = ks_statistic(&xs, &cdf);
            assert!(d <= 0.02, "gamma={gamma_db} dB dof={dof}: KS {d}");
        }
    }
}

#[test]
fn sampler_moments_match_the_law() {
    let cases = [
        NcChiSq::new(2, 0.0, 1.5).unwrap(),
        NcChiSq::new(2, 40.0, 0.1).unwrap(),
        NcChiSq::new(50, 25.0, 2.0).unwrap(),
        NcChiSq::received_power(300, 0.5, 1e-10).unwrap(),
    ];
    for (i, law) in cases.iter().enumerate() {
        let v = sorted_draws(law, 200_000, 100 + i as u64);
        let (m, var) = mean_var(&v);
        let n = v.len() as f64;
        let se_mean = (law.variance() / n).sqrt();
        assert!((m - law.mean()).abs() < 4.0 * se_mean, "case {i}: mean {m} vs {}", law.mean());
        // var of the sample variance ≈ (μ4 − σ⁴)/n; μ4 ≤ 15σ⁴ for these laws
        let se_var = law.variance() * (14.0 / n).sqrt();
        assert!((var - law.variance()).abs() < 4.0 * se_var, "case {i}: var {var} vs {}", law.variance());
    }
}

#[test]
fn central_two_dof_is_exponential() {
    let law = NcChiSq::new(2, 0.0, 3.0).unwrap();
    let g = gamma_match(&law);
    assert!((g.shape() - 1.0).abs() < 1e-12);
    assert!((g.scale() - 6.0).abs() < 1e-12);
    for x in [0.5, 3.0, 12.0] {
        assert!((g.cdf(x).unwrap() - (1.0 - (-x / 6.0f64).exp())).abs() < 1e-13);
    }
}

#[test]
fn nakagami_draws_follow_their_law() {
    for (i, m) in [0.5, 1.0, 5.0].into_iter().enumerate() {
        let law = NakagamiGain::new(m, 2e-9).unwrap();
        let xs = sorted_draws(&law, DRAWS, 200 + i as u64);
        let (mean, _) = mean_var(&xs);
        let se = 2e-9 / (m * xs.len() as f64).sqrt();
        assert!((mean - 2e-9).abs() < 4.0 * se, "m={m}: mean {mean}");
        let cdf: Vec<f64> = xs.iter().map(|&x| nakagami_gain_cdf(&law, x).unwrap()).collect();
        assert!(ks_statistic(&xs, &cdf) < 0.015);
    }
}

#[test]
fn rate_law_is_normalized_over_the_figure_grid() {
    let tol = Tolerance::default();
    let p = Scenario::default().with_gamma(10.0);
    for inr_db in [-10.0, 0.0, 10.0] {
        for samples in [100, 1000, 10_000] {
            let g_pt = 10f64.powf(inr_db / 10.0) * p.sigma2;
            let d = capacity_dist(&p, samples, p.g_st_sr, g_pt, p.p_full).unwrap();
            let mass = d.total_mass(&tol).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "inr={inr_db} N={samples}: mass {mass}");
            let med = d.quantile(0.5, &tol).unwrap();
            assert!((d.cdf(med, &tol).unwrap() - 0.5).abs() < 1e-7);
        }
    }
}

#[test]
fn rate_law_cdf_is_monotone() {
    let tol = Tolerance::default();
    let gain = GammaApprox::new(3.0, 2.0).unwrap();
    let interf = GammaApprox::new(40.0, 0.05).unwrap();
    let d = CapacityDist::new(gain, interf, 1.0).unwrap();
    let xs: Vec<f64> = (1..200).map(|k| k as f64 * 0.05).collect();
    let c = d.cdf_many(&xs, &tol).unwrap();
    assert!(c.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(c[0] >= 0.0 && c[c.len() - 1] <= 1.0 + 1e-12);
}
