use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const E: f64 = std::f64::consts::E;

const GAME: &str = r#""game": {"n": 10, "alpha": 1.0,
    "cost": {"kind": "exp_cost", "scale": 1.0, "rate": 1.0},
    "noise": {"kind": "hyperbolic_noise", "rho": 1.0}}"#;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, format!("{{{GAME}, {body}}}")).unwrap();
        p
    }

    fn raw(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn run(sub: &str, config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effort-contracts"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

fn run_to(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(sub, config, &args)
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let split = |l: &str| l.split(',').map(str::to_owned).collect::<Vec<_>>();
        let header = split(lines.next().unwrap());
        Csv {
            header,
            rows: lines.map(split).collect(),
        }
    }

    fn read(path: &Path) -> Self {
        Self::parse(&std::fs::read_to_string(path).unwrap())
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn text(&self, name: &str) -> Vec<&str> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].as_str()).collect()
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

#[test]
fn equilibrium_rows() {
    let sb = Sandbox::new();
    let cfg = sb.config("eq.json", r#""contract": {"gamma": 5.0}"#);
    let out = sb.path("eq.csv");
    assert!(run_to("equilibrium", &cfg, &out, &[]).status.success());
    let csv = Csv::read(&out);
    assert_eq!(
        csv.header,
        [
            "index",
            "gamma",
            "delta",
            "a_star",
            "boundary",
            "xi_residual",
            "mse_contribution"
        ]
    );
    assert_eq!(csv.rows.len(), 10);
    for (a, r) in csv.col("a_star").iter().zip(csv.col("xi_residual")) {
        assert!((a - 0.537_891_820_044_375).abs() < 1e-10);
        assert!(r.abs() <= 1e-10);
    }
    assert!(csv.text("boundary").iter().all(|b| *b == "false"));
}

#[test]
fn stdout_when_no_output_path() {
    let sb = Sandbox::new();
    let cfg = sb.config("eq.json", r#""contract": {"gamma": 0.0, "delta": 1.0}"#);
    let out = run("equilibrium", &cfg, &[]);
    assert!(out.status.success());
    let csv = Csv::parse(&String::from_utf8(out.stdout).unwrap());
    assert!(csv.col("a_star").iter().all(|&a| a == 0.0));
    assert!(csv.text("boundary").iter().all(|b| *b == "true"));
    assert!(csv.col("delta").iter().all(|&d| d == 1.0));
}

#[test]
fn sweep_identities() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "sweep.json",
        r#""sweep": {"gamma_min": 0.01, "gamma_max": 1000.0, "gamma_steps": 40, "n_list": [2, 10, 100]}"#,
    );
    let out = sb.path("sweep.csv");
    assert!(run_to("sweep", &cfg, &out, &[]).status.success());
    let csv = Csv::read(&out);
    assert_eq!(csv.rows.len(), 120);
    let (n, a, mse) = (csv.col("n"), csv.col("a_star"), csv.col("mse"));
    let (budget, pay, util) = (
        csv.col("budget"),
        csv.col("expected_payment"),
        csv.col("expected_utility"),
    );
    for k in 0..csv.rows.len() {
        assert!((mse[k] - 1.0 / (1.0 + a[k]) / n[k]).abs() <= 1e-10);
        assert!(util[k].abs() <= 1e-10, "row {k}: utility {}", util[k]);
        assert!(rel(budget[k], n[k] * pay[k]) <= 1e-12);
        // the IR floor pays exactly the effort cost
        assert!(rel(budget[k], n[k] * a[k].exp()) <= 1e-10);
        if k > 0 && n[k] == n[k - 1] {
            assert!(a[k] >= a[k - 1]);
        }
    }
}

#[test]
fn linear_spacing_and_config_output() {
    let sb = Sandbox::new();
    let target = sb.path("lin.csv");
    let cfg = sb.config(
        "lin.json",
        &format!(
            r#""sweep": {{"gamma_min": 1.0, "gamma_max": 3.0, "gamma_steps": 3, "spacing": "linear"}},
               "output": "{}""#,
            target.display()
        ),
    );
    let out = run("sweep", &cfg, &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(Csv::read(&target).col("gamma"), [1.0, 2.0, 3.0]);
}

#[test]
fn design_for_epsilon_and_budget() {
    let sb = Sandbox::new();
    let eps_cfg = sb.config("eps.json", r#""design": {"epsilon": 0.5}"#);
    let beta_cfg = sb.config(
        "beta.json",
        &format!(r#""design": {{"beta": {}}}"#, 10.0 * E),
    );
    let (eps_out, beta_out) = (sb.path("eps.csv"), sb.path("beta.csv"));
    assert!(run_to("design", &eps_cfg, &eps_out, &[]).status.success());
    assert!(run_to("design", &beta_cfg, &beta_out, &[]).status.success());
    let csv = Csv::read(&eps_out);
    assert!(rel(csv.col("gamma")[0], 400.0 * E / 81.0) < 1e-14);
    assert!(rel(csv.col("delta")[0], 29.0 * E / 9.0) < 1e-14);
    assert!((csv.col("a_star")[0] - 1.0).abs() < 1e-8);
    assert!((csv.col("mse")[0] - 0.5).abs() < 1e-10);
    assert!((csv.col("estimator_mse")[0] - 0.05).abs() < 1e-10);
    assert!(rel(csv.col("budget")[0], 10.0 * E) < 1e-10);
    assert!(rel(csv.col("fundamental_floor")[0], 10.0 * E) < 1e-14);
    let by_budget = Csv::read(&beta_out);
    assert!((by_budget.col("epsilon")[0] - 0.5).abs() < 1e-12);
    assert!(rel(by_budget.col("gamma")[0], 400.0 * E / 81.0) < 1e-12);
}

#[test]
fn simulate_is_reproducible_and_seed_overrides() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "sim.json",
        r#""contract": {"gamma": 5.0}, "simulate": {"replications": 5000, "seed": 3}"#,
    );
    let (a, b, c) = (sb.path("a.csv"), sb.path("b.csv"), sb.path("c.csv"));
    assert!(run_to("simulate", &cfg, &a, &[]).status.success());
    assert!(run_to("simulate", &cfg, &b, &[]).status.success());
    assert!(run_to("simulate", &cfg, &c, &["--seed", "4"])
        .status
        .success());
    let bytes = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&c));
    let csv = Csv::read(&a);
    assert_eq!(
        csv.header,
        [
            "quantity",
            "sensor",
            "analytic",
            "empirical",
            "std_err",
            "z_score",
            "pass"
        ]
    );
    assert_eq!(csv.rows.len(), 21);
    assert!(!sb.path("a_scan.csv").exists());
}

#[test]
fn simulate_scan_file() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "scan.json",
        r#""design": {"epsilon": 0.5},
           "simulate": {"replications": 200000, "seed": 11, "noise_shape": "uniform_symmetric",
                        "deviation_scan": {"sensor": 3, "grid_min": 0.0, "grid_max": 2.0, "grid_step": 0.25}}"#,
    );
    let out = sb.path("sim.csv");
    assert!(run_to("simulate", &cfg, &out, &[]).status.success());
    let scan = Csv::read(&sb.path("sim_scan.csv"));
    assert_eq!(scan.col("effort").len(), 9);
    let argmax: Vec<&str> = scan.text("argmax");
    let best = argmax.iter().position(|m| *m == "true").unwrap();
    assert_eq!(scan.col("effort")[best], 1.0);
}

#[test]
fn simulate_without_seed_is_a_config_error() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "sim.json",
        r#""contract": {"gamma": 5.0}, "simulate": {"replications": 10}"#,
    );
    let out = sb.path("x.csv");
    assert_eq!(run_to("simulate", &cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
    assert!(run_to("simulate", &cfg, &out, &["--seed", "1"])
        .status
        .success());
}

#[test]
fn config_errors_exit_2_without_output() {
    let sb = Sandbox::new();
    let bad = [
        sb.raw("truncated.json", "{\"game\": {\"n\": 10"),
        sb.config("unknown.json", r#""contract": {"gamma": 1.0, "gain": 2}"#),
        sb.config("no_contract.json", r#""output": "x.csv""#),
        sb.config("neg_gamma.json", r#""contract": {"gamma": -1.0}"#),
        sb.raw(
            "bad_kind.json",
            r#"{"game": {"n": 3, "alpha": 1, "cost": {"kind": "log_cost"}, "noise": {"kind": "exp_noise", "variance0": 1, "rate": 1}}, "contract": {"gamma": 1}}"#,
        ),
        sb.raw(
            "noise_as_cost.json",
            r#"{"game": {"n": 3, "alpha": 1, "cost": {"kind": "exp_noise", "variance0": 1, "rate": 1}, "noise": {"kind": "exp_noise", "variance0": 1, "rate": 1}}, "contract": {"gamma": 1}}"#,
        ),
        sb.config("both_targets.json", r#""design": {"epsilon": 0.5, "beta": 3.0}"#),
        sb.path("missing.json"),
    ];
    for cfg in &bad {
        let out = sb.path("out.csv");
        let res = run_to("equilibrium", cfg, &out, &[]);
        let res = if cfg.ends_with("both_targets.json") {
            run_to("design", cfg, &out, &[])
        } else {
            res
        };
        assert_eq!(res.status.code(), Some(2), "{}", cfg.display());
        assert!(!out.exists(), "{}", cfg.display());
        assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));
    }
}

#[test]
fn unattainable_targets_exit_4() {
    let sb = Sandbox::new();
    for (name, body) in [
        ("eps_high.json", r#""design": {"epsilon": 2.0}"#),
        ("eps_zero.json", r#""design": {"epsilon": 0.0}"#),
        ("beta_low.json", r#""design": {"beta": 5.0}"#),
    ] {
        let cfg = sb.config(name, body);
        let out = sb.path("out.csv");
        let res = run_to("design", &cfg, &out, &[]);
        assert_eq!(res.status.code(), Some(4), "{name}");
        assert!(!out.exists());
    }
}

#[test]
fn runaway_effort_is_a_solver_failure() {
    let sb = Sandbox::new();
    // optimal effort near sqrt(αγ·k) ≈ 1e7, beyond the search cap
    let cfg = sb.raw(
        "runaway.json",
        r#"{"game": {"n": 2, "alpha": 1, "cost": {"kind": "power_cost", "exponent": 1}, "noise": {"kind": "hyperbolic_noise", "rho": 1}}, "contract": {"gamma": 4e14}}"#,
    );
    let res = run("equilibrium", &cfg, &[]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_1() {
    let sb = Sandbox::new();
    let cfg = sb.config("eq.json", r#""contract": {"gamma": 5.0}"#);
    let out = sb.path("no_such_dir").join("eq.csv");
    assert_eq!(
        run_to("equilibrium", &cfg, &out, &[]).status.code(),
        Some(1)
    );
}

#[test]
fn asymmetric_sensors() {
    let sb = Sandbox::new();
    let cfg = sb.raw(
        "asym.json",
        r#"{"game": {"sensors": [
              {"alpha": 1, "cost": {"kind": "exp_cost", "rate": 1}, "noise": {"kind": "hyperbolic_noise", "rho": 1}},
              {"alpha": 2, "cost": {"kind": "power_cost", "exponent": 2}, "noise": {"kind": "exp_noise", "variance0": 1, "rate": 1}},
              {"alpha": 1, "cost": {"kind": "power_cost", "exponent": 1, "offset": 0.5}, "noise": {"kind": "hyperbolic_noise", "rho": 2}}]},
            "contract": {"gamma": [5.0, 1.0, 0.0], "delta": [2.0, "ir_floor", 1.0]}}"#,
    );
    let out = run("equilibrium", &cfg, &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = Csv::parse(&String::from_utf8(out.stdout).unwrap());
    let a = csv.col("a_star");
    // e^a (1+a)² = αγ((n−1)/n)² for the first sensor
    assert!((a[0].exp() * (1.0 + a[0]).powi(2) - 20.0 / 9.0).abs() < 1e-9);
    // quadratic cost against exponential noise: 2·a = 2·(4/9)·e^{-a}
    assert!((a[1] - 4.0 / 9.0 * (-a[1]).exp()).abs() < 1e-9);
    assert_eq!(a[2], 0.0);
    assert_eq!(csv.col("delta")[0], 2.0);
}
