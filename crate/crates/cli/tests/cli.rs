use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use rcbm_cli::config::RunConfig;
use rcbm_cli::output::{finish, OutDir};
use rcbm_sim::bm_sim::InitialCondition;
use rcbm_sim::srpt_sim::ArrivalKind;

fn rcbm(args: &[&str], dir: &Path) -> std::process::Output {
    Proc::new(env!("CARGO_BIN_EXE_rcbm"))
        .args(args)
        .current_dir(dir)
        .env_remove("RCBM_OUT")
        .output()
        .unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn config_round_trips() {
    let mut cfg = RunConfig::default();
    assert_eq!(RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);

    cfg.subcommand = Some("ndist eval".into());
    cfg.seed = 7;
    cfg.n = Some(1234);
    cfg.dt = Some(0.005);
    cfg.initial = InitialCondition::Tabulated {
        knots: vec![(0.5, 0.25), (2.0, 1.0)],
    };
    cfg.grids.a = vec![0.5, f64::INFINITY];
    cfg.grids.t = vec![0.5, f64::INFINITY];
    cfg.ndist.constraints = Some(vec![(0.5, 1.0), (1.0, 2.0)]);
    cfg.srpt.arrival = ArrivalKind::GammaRenewal { shape: 2.5 };
    cfg.srpt.q0 = vec![3.0, 1.0];
    cfg.srpt.workload_every = 0.0;
    cfg.drift = rcbm_core::DriftSpec::tabulated(1.5, vec![(0.5, 4.0), (1.0, 2.0), (4.0, 1.0)], 0.5)
        .unwrap();
    let text = cfg.to_toml().unwrap();
    assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg, "{text}");
}

#[test]
fn minimal_config_is_valid() {
    let text = r#"
subcommand = "measure eval"
seed = 42

[drift]
sigma = 1.0
kind = "srpt"
kappa = 1.0
lambda_tilde = 1.0
p = 2.0
"#;
    let cfg = RunConfig::from_toml(text).unwrap();
    assert_eq!(cfg.seed, 42);
    assert!(cfg.srpt_limit().is_ok());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        ("seed = -1", "u64"),
        (
            "[drift]\nsigma = 1.0\nkind = \"srpt\"\nkappa = 1.0\nlambda_tilde = 1.0\np = 0.5",
            "p must exceed 1",
        ),
        ("[srpt]\np = 0.5", "p must exceed 1"),
        ("bogus = 1", "unknown field"),
        ("[grids]\nxs = [1.0]", "unknown field"),
        ("[initial]\nkind = \"ramp\"\nc = 1.0\nscale = -1.0", "scale"),
        ("n = 0", "n:"),
        ("subcommand = \"plot\"", "subcommand"),
        ("[law2d]\na1 = 2.0\na2 = 1.0", "law2d"),
    ];
    for (text, needle) in bad {
        let err = RunConfig::from_toml(text).unwrap_err();
        assert!(err.contains(needle), "{text:?}: {err}");
    }
}

#[test]
fn empty_report_list_gives_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = OutDir::create(dir.path()).unwrap();
    let pass = finish(
        &mut out,
        "validate all",
        &RunConfig::default(),
        1,
        &[],
        serde_json::Value::Null,
    )
    .unwrap();
    assert!(pass);
    let s: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(s["summary"]["total"], 0);
    assert_eq!(s["reports"].as_array().unwrap().len(), 0);
    assert!(!dir.path().join("reports.csv").exists());
}

#[test]
fn analytic_eval_writes_seventeen_digit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &["--out", out.to_str().unwrap(), "analytic", "eval"],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = read(&out.join("analytic.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a,nu,t,x,cdf"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mantissa = row[4].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{}", row[4]);
    // μ(1/2) = 5 at x = 1/4: 1 − e^{−2.5}.
    let v: f64 = row[4].parse().unwrap();
    assert!((v - (1.0 - (-2.5f64).exp())).abs() < 1e-15);
    for f in [
        "joint2d.csv",
        "covariance.csv",
        "analytic_cdf.dat",
        "summary.json",
        "manifest.json",
        "config.toml",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn envelope_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &[
            "--out",
            out.to_str().unwrap(),
            "--n",
            "2000",
            "ndist",
            "eval",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = read(&out.join("envelope.dat"));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 501);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[500][0], 5.0);
    for row in &rows {
        assert_eq!(row.len(), 5);
        let s = row[0];
        let lines = [3.0 * s + 1.0, 2.0 * s + 3.0, s + 6.0];
        for (got, want) in row[1..4].iter().zip(lines) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(row[4], lines.iter().copied().fold(f64::INFINITY, f64::min));
    }
    let nd = read(&out.join("ndist.csv"));
    assert!(nd.starts_with("nu,x,removed,reduced_nu,reduced_x,taus,analytic,mc,stderr,z\n"));
}

#[test]
fn law2d_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &[
            "--out",
            out.to_str().unwrap(),
            "--n",
            "4000",
            "validate",
            "law2d",
        ],
        dir.path(),
    );
    assert!(
        r.status.code() == Some(0) || r.status.code() == Some(1),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let csv = read(&out.join("law2d.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a1,a2,x1,x2,analytic,mc,stderr,z"));
    assert_eq!(lines.count(), 16);
    let s: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(s["pass"].as_bool().unwrap(), r.status.success());
}

#[test]
fn validate_exit_status_reflects_failures() {
    // The printed variance of the total mass is off by 25%, so this suite fails.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &[
            "--out",
            out.to_str().unwrap(),
            "--n",
            "2000",
            "validate",
            "measure",
        ],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(1));
    let s: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert!(!s["pass"].as_bool().unwrap());
    assert!(s["summary"]["failed"].as_u64().unwrap() >= 1);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let r = rcbm(
        &[
            "--out",
            a.to_str().unwrap(),
            "--n",
            "3000",
            "--seed",
            "9",
            "--threads",
            "1",
            "measure",
            "mc",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let m: serde_json::Value = serde_json::from_str(&read(&a.join("manifest.json"))).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["subcommand"], "measure mc");
    let cfg = a.join("config.toml");
    assert_eq!(read(&cfg), m["config_toml"].as_str().unwrap());
    let r = rcbm(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
            "--threads",
            "3",
            "measure",
            "mc",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(&a.join("measure.csv")), read(&b.join("measure.csv")));
    assert_eq!(
        read(&a.join("zstar_hist.dat")),
        read(&b.join("zstar_hist.dat"))
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from_env");
    let r = Proc::new(env!("CARGO_BIN_EXE_rcbm"))
        .args(["measure", "eval"])
        .current_dir(dir.path())
        .env("RCBM_OUT", &env_out)
        .output()
        .unwrap();
    assert!(r.status.success());
    assert!(env_out.join("measure.csv").exists());

    let r = rcbm(&["measure", "eval"], dir.path());
    assert!(r.status.success());
    assert!(dir.path().join("rcbm-out").join("measure.csv").exists());
}

#[test]
fn flags_override_the_file_and_mismatched_subcommand_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "subcommand = \"measure eval\"\nseed = 5\n").unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
            "measure",
            "eval",
        ],
        dir.path(),
    );
    assert!(r.status.success());
    let m: serde_json::Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(m["seed"], 11);
    let r = rcbm(
        &["--config", cfg.to_str().unwrap(), "srpt", "run"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("config is for"));
}

#[test]
fn srpt_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "[srpt]\nr = 5.0\nhorizon = 20.0\nsnapshot_times = [10.0, 20.0]\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let r = rcbm(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "srpt",
            "run",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(read(&out.join("snapshots.csv")).starts_with("t,atom_location,atom_weight\n"));
    let summary = read(&out.join("summary.csv"));
    assert!(summary.starts_with("r,c_r,scaled_workload_mean,"));
    assert_eq!(summary.lines().count(), 2);
}
