use proptest::prelude::*;
use underlay_core::power_control::{
    controlled_power_det, controlled_power_fading, outage_det, outage_fading, perf_bound_det, perf_bound_fading,
    Regime,
};
use underlay_core::scenario::ScenarioParams;
use underlay_core::units::lin_to_db;
use underlay_core::{FadingSpec, NakagamiGain, Scenario, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn controlled_power_falls_with_gamma(g_db in -20.0..10.0f64, step in 0.1..5.0f64, tau_ms in 0.05..50.0f64) {
        let p = Scenario::default();
        let lo = controlled_power_det(&p.with_gamma(10f64.powf(g_db / 10.0)), tau_ms * 1e-3, &tol()).unwrap();
        let hi = controlled_power_det(&p.with_gamma(10f64.powf((g_db + step) / 10.0)), tau_ms * 1e-3, &tol()).unwrap();
        prop_assert!(hi.p_cont <= lo.p_cont * (1.0 + 1e-9));
    }

    #[test]
    fn controlled_power_grows_with_tau(g_db in -15.0..10.0f64, tau_ms in 0.02..40.0f64, factor in 1.1..2.0f64) {
        let p = Scenario::default().with_gamma(10f64.powf(g_db / 10.0));
        let a = controlled_power_det(&p, tau_ms * 1e-3, &tol()).unwrap();
        let b = controlled_power_det(&p, tau_ms * factor * 1e-3, &tol()).unwrap();
        prop_assert!(b.p_cont >= a.p_cont * (1.0 - 1e-9));
        prop_assert!(a.p_cont > 0.0 && a.p_cont <= p.p_full);
    }

    #[test]
    fn interference_limited_power_meets_the_target(g_db in -5.0..10.0f64, tau_ms in 0.1..20.0f64, rho in 0.01..0.3f64) {
        let p = Scenario::default().with_gamma(10f64.powf(g_db / 10.0)).with_rho(rho);
        let pc = controlled_power_det(&p, tau_ms * 1e-3, &tol()).unwrap();
        let out = outage_det(&p, pc.samples, pc.p_cont).unwrap();
        match pc.regime {
            Regime::InterferenceLimited => prop_assert!((out - rho).abs() < 1e-8),
            Regime::PowerLimited => prop_assert!(out <= rho + 1e-8),
        }
    }

    #[test]
    fn gamma_star_grows_with_tau(tau_ms in 0.5..50.0f64, factor in 1.2..3.0f64) {
        let p = Scenario::default();
        let a = perf_bound_det(&p, tau_ms * 1e-3, &tol()).unwrap();
        let b = perf_bound_det(&p, tau_ms * factor * 1e-3, &tol()).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-9));
        prop_assert!(b < p.gamma_limit());
    }
}

#[test]
fn regime_flips_at_the_bound() {
    let p = Scenario::default();
    for tau in [0.5e-3, 1e-3, 5e-3, 20e-3] {
        let g = perf_bound_det(&p, tau, &tol()).unwrap();
        let below = controlled_power_det(&p.with_gamma(g * 0.995), tau, &tol()).unwrap();
        let above = controlled_power_det(&p.with_gamma(g * 1.005), tau, &tol()).unwrap();
        assert_eq!(below.regime, Regime::PowerLimited, "tau={tau}");
        assert_eq!(above.regime, Regime::InterferenceLimited, "tau={tau}");
        assert!(above.p_cont > 0.99 * p.p_full);
    }
}

#[test]
fn fading_bound_orders_with_m_and_approaches_the_deterministic_one() {
    let p = Scenario::default();
    let tau = 1e-3;
    let mut last = f64::NEG_INFINITY;
    for m in [0.5, 1.0, 2.0, 5.0, 20.0] {
        let g = lin_to_db(perf_bound_fading(&p, m, tau, &tol()).unwrap());
        assert!(g > last, "m={m}: {g} dB not above {last} dB");
        last = g;
    }
    let det = lin_to_db(perf_bound_det(&p, tau, &tol()).unwrap());
    let lim = lin_to_db(perf_bound_fading(&p, 1e4, tau, &tol()).unwrap());
    assert!((det - lim).abs() < 0.01, "{det} vs {lim}");
    assert!(last < det);
}

#[test]
fn fading_power_meets_the_averaged_target() {
    let p = Scenario::default();
    for m in [0.5, 1.0, 5.0] {
        let g = NakagamiGain::new(m, p.g_pr_st()).unwrap();
        let pc = controlled_power_fading(&p, &g, 1e-3, &tol()).unwrap();
        assert_eq!(pc.regime, Regime::InterferenceLimited);
        let out = outage_fading(&p, &g, pc.samples, pc.p_cont, &tol()).unwrap();
        assert!((out - p.rho_out).abs() < 1e-6, "m={m}: {out}");
    }
}

#[test]
fn nearly_deterministic_fading_matches_the_deterministic_power() {
    let p = Scenario::default();
    let spec = FadingSpec::symmetric(&p, 1e4).unwrap();
    for tau in [0.1e-3, 1e-3, 10e-3] {
        let f = controlled_power_fading(&p, &spec.pr_st, tau, &tol()).unwrap().p_cont;
        let d = controlled_power_det(&p, tau, &tol()).unwrap().p_cont;
        assert!((f / d - 1.0).abs() < 5e-3, "tau={tau}: {f} vs {d}");
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let p32 = ScenarioParams::<f32>::default();
    let p64 = Scenario::default();
    let t32 = underlay_core::specfun::Tolerance::<f32>::default();
    for tau in [1e-4, 1e-3, 1e-2] {
        let a = controlled_power_det(&p32, tau as f32, &t32).unwrap().p_cont as f64;
        let b = controlled_power_det(&p64, tau, &tol()).unwrap().p_cont;
        assert!((a / b - 1.0).abs() < 1e-3, "tau={tau}: {a} vs {b}");
    }
    let g32 = perf_bound_det(&p32, 1e-3, &t32).unwrap() as f64;
    let g64 = perf_bound_det(&p64, 1e-3, &tol()).unwrap();
    assert!((g32 / g64 - 1.0).abs() < 1e-3);
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = Scenario::default();
    assert!(controlled_power_det(&p, 0.0, &tol()).is_err());
    assert!(controlled_power_det(&p, 0.2, &tol()).is_err());
    assert!(controlled_power_det(&p.with_rho(0.0), 1e-3, &tol()).is_err());
    assert!(perf_bound_fading(&p, 0.3, 1e-3, &tol()).is_err());
}
