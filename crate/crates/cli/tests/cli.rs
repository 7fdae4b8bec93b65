use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"{
  "protocol": { "m": 2, "r": 1.0 },
  "loss": { "eta_a": 1.0, "eta_b": 1.0, "tau": 0.005, "j": 2 },
  "cavity": {
    "chi_over_2pi_hz": 1.0e5,
    "gamma_over_2pi_hz": 1.0e8,
    "kappa_over_2pi_hz": 4.0e6,
    "g": 100.0,
    "t_meas_s": 8.0e-9,
    "n_samples": 2000,
    "sde_trajectories": 50
  },
  "run": { "n_shots": 3000, "seed": 5 }
}"#;

fn cvd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvd"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn setup(text: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), text).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn feasibility_json_reports_reference_window() {
    let dir = setup(CONFIG);
    let o = cvd(&["feasibility", "--config", "cfg.json", "--format", "json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["data"];
    let t_min = row["t_min_s"].as_f64().unwrap();
    let t_max = row["t_max_s"].as_f64().unwrap();
    assert!((t_min / 2.49e-9 - 1.0).abs() < 0.01, "{t_min}");
    assert!((t_max / 2.88e-8 - 1.0).abs() < 0.01, "{t_max}");
    assert_eq!(row["feasible"], serde_json::Value::Bool(true));
    assert_eq!(v["meta"]["command"], "feasibility");
    assert_eq!(v["meta"]["seed"], 5);
}

#[test]
fn analytic_csv_has_provenance_header() {
    let dir = setup(CONFIG);
    let o = cvd(&["analytic", "--config", "cfg.json", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/analytic.csv")).unwrap();
    assert!(text.starts_with(&format!("# cvd {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# config_sha256: "));
    assert!(text.contains("# seed: 5"));
    assert!(dir.path().join("out/yield.csv").exists());
}

#[test]
fn every_simulation_is_deterministic() {
    let dir = setup(CONFIG);
    for cmd in ["simulate-protocol", "simulate-loss", "simulate-qnd"] {
        let a = cvd(&[cmd, "--config", "cfg.json", "--out", "a", "--seed", "17"], dir.path());
        let b = cvd(&[cmd, "--config", "cfg.json", "--out", "b", "--seed", "17"], dir.path());
        assert!(a.status.success() && b.status.success(), "{cmd}: {}", stderr(&a));
    }
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8, "{names:?}");
    for n in names {
        let x = std::fs::read(dir.path().join("a").join(&n)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(&n)).unwrap();
        assert_eq!(x, y, "{n:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = setup(CONFIG);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_cvd"))
            .args(["simulate-protocol", "--config", "cfg.json"])
            .env("CVD_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run("0").stdout, run("3").stdout);
    assert_eq!(run("bogus").status.code(), Some(2));
}

#[test]
fn invalid_config_exits_two_with_location() {
    let dir = setup("{\n  \"protocol\": { \"m\": 2,\n    \"lambda\": 1.5 }\n}");
    let o = cvd(&["analytic", "--config", "cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cfg.json:3:"), "{}", stderr(&o));

    let dir = setup("{ \"protocol\": { \"m\": 2, \"r\": 1.0, \"typo\": 1 } }");
    let o = cvd(&["validate", "--config", "cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = cvd(&["simulate-loss", "--config", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn first_order_guard_warns_and_skips_trajectories() {
    let cfg = CONFIG.replace("\"tau\": 0.005", "\"tau\": 0.5");
    let dir = setup(&cfg);
    let o = cvd(&["simulate-loss", "--config", "cfg.json", "--out", "o"], dir.path());
    let err = stderr(&o);
    assert!(o.status.success(), "{err}");
    assert!(err.contains("warning:") && err.contains("0.2"), "{err}");
    assert!(!dir.path().join("o/trajectories.csv").exists());
    assert!(dir.path().join("o/infidelity_scan.csv").exists());
}

#[test]
fn numeric_guard_exits_one_with_name() {
    let cfg = CONFIG.replace("\"m\": 2, \"r\": 1.0", "\"m\": 7, \"r\": 1.5");
    let dir = setup(&cfg);
    let o = cvd(&["simulate-protocol", "--config", "cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("DimensionTooLarge"), "{}", stderr(&o));
}

#[test]
fn validate_accepts_reference_config() {
    let dir = setup(CONFIG);
    let o = cvd(&["validate", "--config", "cfg.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("ok"));
}

#[test]
fn reproduce_runs_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = cvd(&["reproduce-paper", "--seed", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# failed: 0"), "{out}");
    assert!(!out.lines().skip_while(|l| l.starts_with('#')).any(|l| l.ends_with(",false")));
}
