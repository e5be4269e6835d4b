use std::fs;

use spinboson::dynamics::Engine;
use spinboson::toolcli::cli::main_with_args;
use spinboson::toolcli::{
    cycle_maxima, emit_figure_data, fit_decay, parse_config, run_sweep, FigureOptions, FigureTag, SweepSpec,
};

fn small_ohmic() -> SweepSpec {
    SweepSpec {
        horizon: 1.0,
        cpt_times: 5,
        ..SweepSpec::ohmic_cutoff(0.01, [2.0, 10.0], 3)
    }
}

fn csv(spec: &SweepSpec) -> Vec<u8> {
    let mut out = Vec::new();
    run_sweep(spec).unwrap().write_csv(&mut out).unwrap();
    out
}

#[test]
fn ohmic_sweep_is_markovian_under_rwa_and_sa() {
    let t = run_sweep(&small_ohmic()).unwrap();
    assert_eq!(t.rows.len(), 3);
    for r in &t.rows {
        assert_eq!(r.status, "ok");
        assert_eq!(r.n_rwa, Some(0.0));
        assert_eq!(r.n_sa, Some(0.0));
        assert!(r.n_full.unwrap() >= 0.0);
        assert_eq!(r.cpt_pass, Some(true));
    }
    assert!(t.rows.windows(2).all(|w| w[0].x < w[1].x));
}

#[test]
fn sweep_output_is_byte_stable_across_workers() {
    let a = csv(&SweepSpec {
        workers: Some(1),
        ..small_ohmic()
    });
    let b = csv(&SweepSpec {
        workers: Some(3),
        ..small_ohmic()
    });
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# spinboson"));
    assert!(text.lines().any(|l| l.starts_with("x,status,N_full")));
}

#[test]
fn failing_points_are_flagged_not_fatal() {
    let spec = SweepSpec {
        horizon: 0.01,
        cpt_times: 0,
        engines: vec![Engine::FullClosed],
        ..SweepSpec::ohmic_cutoff(0.01, [0.2, 20.0], 3)
    };
    let t = run_sweep(&spec).unwrap();
    assert!(t.rows[0].status.starts_with("error"));
    assert!(t.rows[0].nu.is_some());
    assert_eq!(t.rows[2].status, "ok");
    assert!(t.rows[2].n_full.is_some());
}

#[test]
fn figure_tags_and_fig4() {
    assert!("fig7".parse::<FigureTag>().is_err());
    for t in FigureTag::ALL {
        assert_eq!(t.to_string().parse::<FigureTag>().unwrap(), t);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let files = emit_figure_data(FigureTag::Fig4, &FigureOptions::default(), &path).unwrap();
    assert_eq!(files, vec![path.clone()]);
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("omega"))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 601);
    // both densities peak at the qubit frequency
    let peak = |col: usize| rows.iter().max_by(|a, b| a[col].partial_cmp(&b[col]).unwrap()).unwrap()[0];
    assert!((peak(3) - 1.0).abs() < 1e-9);
    assert!((peak(4) - 1.0).abs() < 1e-9);
}

#[test]
fn fig1b_columns_from_a_short_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let opts = FigureOptions {
        points: 3,
        range: Some([2.0, 10.0]),
        horizon: 1.0,
        ..FigureOptions::default()
    };
    emit_figure_data(FigureTag::Fig1b, &opts, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "omega_c,N_full,N_RWA,N_SA,status");
    for l in &body[1..] {
        let c: Vec<&str> = l.split(',').collect();
        assert_eq!((c[2], c[3], c[4]), ("0", "0", "ok"));
    }
}

#[test]
fn decay_fit_and_cycle_maxima() {
    // oracle: sampled (e^{-t/50}) (3 cos(2t) - 1)
    let ts: Vec<f64> = (0..20000).map(|k| k as f64 * std::f64::consts::PI / 40.0).collect();
    let s: Vec<f64> = ts.iter().map(|t| (-t / 50.0f64).exp() * (3.0 * (2.0 * t).cos() - 1.0)).collect();
    let m = cycle_maxima(&ts, &s, 1.0, 400.0, std::f64::consts::PI);
    assert!(m.len() > 120);
    for (t, v) in &m {
        assert!((v - 2.0 * (-t / 50.0f64).exp()).abs() < 1e-3 * v.abs());
    }
    let (tau, amp) = fit_decay(&m).unwrap();
    assert!((tau - 50.0).abs() < 0.5, "{tau}");
    assert!((amp - 2.0).abs() < 0.05);
    assert!(fit_decay(&[(1.0, 1.0)]).is_err());
}

#[test]
fn cli_exit_codes() {
    assert_eq!(main_with_args(["spinboson", "--help"]), 0);
    assert_eq!(main_with_args(["spinboson", "nonsense"]), 1);
    assert_eq!(main_with_args(["spinboson", "--lambda", "-0.1", "analytic"]), 1);
    assert_eq!(main_with_args(["spinboson", "figure", "fig9"]), 1);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let code = main_with_args([
        "spinboson",
        "kraus",
        "--at",
        "0,5,50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[2]["pass"], true);
    assert!(v[1]["completeness_residual"].as_f64().unwrap() < 1e-9);

    let cfg = dir.path().join("s.toml");
    fs::write(&cfg, "family = \"ohmic\"\nrange = [2.0, 10.0]\npoints = 2\nhorizon = 1.0\ncpt_times = 0\n").unwrap();
    let csv = dir.path().join("s.csv");
    let args = ["spinboson", "sweep", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()];
    assert_eq!(main_with_args(args), 0);
    assert!(fs::read_to_string(&csv).unwrap().contains("\n2,ok,"));
    fs::write(&cfg, "family = \"ohmic\"\nlambda = 0.3\n").unwrap();
    assert_eq!(main_with_args(["spinboson", "sweep", "--config", cfg.to_str().unwrap()]), 1);
    assert!(parse_config("family = \"ohmic\"\nlambda = 0.3\n").is_err());
}
