use std::path::Path;
use std::process::{Command, Output};

use underlay_cli::config::{Axis, Config, FadingConfig, RangeSpec, Spacing};

const BIN: &str = env!("CARGO_BIN_EXE_underlay");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV table, comment lines dropped.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let data = rd
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, data)
}

fn cell<'a>(header: &[String], row: &'a [String], name: &str) -> &'a str {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    &row[i]
}

fn default_toml() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn shipped_config_is_the_builtin_default() {
    assert_eq!(Config::parse(&default_toml(), &[]).unwrap(), Config::default());
    assert_eq!(Config::parse("", &[]).unwrap(), Config::default());
}

#[test]
fn config_round_trips_through_toml() {
    let mut cfg = Config::default();
    cfg.sweep.gamma_db = Some(Axis::Range(RangeSpec {
        from: -20.0,
        to: 10.0,
        points: 7,
        spacing: Spacing::Linear,
    }));
    cfg.sweep.tau_ms = Some(Axis::Range(RangeSpec {
        from: 0.1,
        to: 10.0,
        points: 5,
        spacing: Spacing::Log,
    }));
    cfg.sweep.rho_out = Some(Axis::Values(vec![0.01, 0.1]));
    cfg.fading = Some(FadingConfig {
        m: 2.0,
        m_pr_st: Some(1.0),
        m_pt_sr: None,
        m_st_sr: None,
        mean_pt_sr_db: None,
        mean_st_sr_db: Some(-83.5),
    });
    cfg.scenario.gamma_db = -3.3;
    let text = cfg.render();
    assert_eq!(Config::parse(&text, &[]).unwrap(), cfg);
}

#[test]
fn overrides_apply_in_order() {
    let sets = ["scenario.gamma_db=3".to_string(), "sweep.m=[1.0, 5.0]".into(), "mc.seed=9".into()];
    let cfg = Config::parse("", &sets).unwrap();
    assert_eq!(cfg.scenario.gamma_db, 3.0);
    assert_eq!(cfg.sweep.m, Some(Axis::Values(vec![1.0, 5.0])));
    assert_eq!(cfg.mc.seed, 9);
}

#[test]
fn bad_configs_exit_with_usage_status() {
    for args in [
        &["sweep", "--set", "scenario.rho_out=0"][..],
        &["sweep", "--set", "scenario.rho_out=1.5"],
        &["sweep", "--set", "sweep.tau_ms=[]"],
        &["sweep", "--set", "sweep.max_rows=3", "--set", "sweep.tau_ms=[0.1, 0.2, 0.5, 1.0]"],
        &["sweep", "--set", "scenario.no_such_key=1"],
        &["sweep", "--set", "sweep.tau_ms=[200.0]"],
        &["figure", "fig10"],
        &["frobnicate"],
        &["validate", "--trials", "10"],
        &["sweep", "--config", "/nonexistent/underlay.toml"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn tampered_threshold_fails_validation() {
    let o = run(&[
        "validate",
        "--trials",
        "5000",
        "--set",
        "scenario.theta_i_dbm=-130",
        "--set",
        "validate.taus_ms=[1.0]",
        "--set",
        "validate.rhos=[0.1]",
        "--set",
        "validate.fading_m=[1.0]",
        "--set",
        "validate.capacity_inr_db=[0.0]",
        "--set",
        "validate.capacity_taus_ms=[1.0]",
    ]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().any(|l| l.contains("full_power_outage")), "{text}");
}

#[test]
fn sweep_point_matches_the_figure_rows() {
    let fig = run(&["figure", "fig6b", "--set", "mc.sim_tau_max_ms=0", "--trials", "1000"]);
    assert_eq!(code(&fig), 0);
    let (fh, frows) = rows(&stdout(&fig));
    for r in frows.iter().step_by(9) {
        let (rho, tau) = (cell(&fh, r, "rho_out"), cell(&fh, r, "tau_ms"));
        let sw = run(&[
            "sweep",
            "--set",
            &format!("sweep.rho_out=[{rho}]"),
            "--set",
            &format!("sweep.tau_ms=[{tau}]"),
        ]);
        assert_eq!(code(&sw), 0);
        let (sh, srows) = rows(&stdout(&sw));
        assert_eq!(srows.len(), 1);
        assert_eq!(cell(&sh, &srows[0], "tau_ms"), tau);
        assert_eq!(cell(&sh, &srows[0], "rs_EM"), cell(&fh, r, "rs_EM"), "rho={rho} tau={tau}");
        assert_eq!(cell(&sh, &srows[0], "rs_IM"), cell(&fh, r, "rs_IM"));
    }

    let fig = run(&["figure", "fig8b", "--set", "mc.sim_tau_max_ms=0", "--trials", "1000"]);
    assert_eq!(code(&fig), 0);
    let (fh, frows) = rows(&stdout(&fig));
    for r in frows.iter().step_by(11) {
        let (m, tau) = (cell(&fh, r, "m"), cell(&fh, r, "tau_ms"));
        let sw = run(&["sweep", "--set", &format!("sweep.m=[{m}]"), "--set", &format!("sweep.tau_ms=[{tau}]")]);
        assert_eq!(code(&sw), 0);
        let (sh, srows) = rows(&stdout(&sw));
        assert_eq!(cell(&sh, &srows[0], "rs_EM"), cell(&fh, r, "rs_EM"), "m={m} tau={tau}");
        assert_eq!(cell(&sh, &srows[0], "rs_IM"), cell(&fh, r, "rs_IM"));
    }
}

#[test]
fn figure_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = run(&["figure", "fig4a", "--trials", "1000", "--jobs", jobs, "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn metadata_echoes_the_configuration() {
    let o = run(&["sweep", "--seed", "17", "--set", "scenario.gamma_db=-2.5", "--set", "scenario.theta_i_dbm=-111.25"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# underlay "));
    assert!(text.contains("# seed = 17\n"));
    assert!(text.contains("#   gamma_db = -2.5\n"));
    assert!(text.contains("#   theta_i_dbm = -111.25\n"));
    let (h, r) = rows(&text);
    assert_eq!(cell(&h, &r[0], "gamma_db"), "-2.5");

    // the echoed config reproduces the run
    let cfg_text: String = text
        .lines()
        .skip_while(|l| *l != "# config:")
        .skip(1)
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
        .collect();
    let cfg = Config::parse(&cfg_text, &[]).unwrap();
    assert_eq!(cfg.scenario.gamma_db, -2.5);
    assert_eq!(cfg.mc.seed, 17);
}

#[test]
fn sweep_orders_tau_fastest() {
    let o = run(&["sweep", "--set", "sweep.gamma_db=[-5.0, 5.0]", "--set", "sweep.tau_ms={from = 0.1, to = 1.0, points = 3, spacing = \"log\"}"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (h, r) = rows(&stdout(&o));
    let got: Vec<(&str, &str)> = r.iter().map(|r| (cell(&h, r, "gamma_db"), cell(&h, r, "samples"))).collect();
    assert_eq!(
        got,
        [("-5", "100"), ("-5", "316"), ("-5", "1000"), ("5", "100"), ("5", "316"), ("5", "1000")]
    );
}
