use std::process::{Command, Output};

use serde_json::Value;

fn run_with(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_density-lab"));
    cmd.args(args);
    match env_seed {
        Some(s) => cmd.env("DENSITY_LAB_SEED", s),
        None => cmd.env_remove("DENSITY_LAB_SEED"),
    };
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with(args, None)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const COMPOSITE: &[&str] = &["profile", "kind=composite", "alpha1=0.4", "alpha2=0.5", "beta1=0.5", "beta2=0.8", "ratio=16", "depth=6", "a0=1"];

#[test]
fn region_queries_report_certificates() {
    let o = run(&["region", "d24", "1/5", "1/4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["certificate"]["k"], 4);

    let o = run(&["region", "d13", "2/7", "3/7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["certificate"]["g0"], 7);

    let o = run(&["region", "poly", "3/7", "3/7", "6/7", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["solve"]["realized_by_g"], false);
}

#[test]
fn region_negative_and_bad_input() {
    assert_eq!(code(&run(&["region", "poly", "1/2", "1/4", "3/4", "1"])), 1);
    assert_eq!(code(&run(&["region", "poly", "1/2", "1/2"])), 2);
    assert_eq!(code(&run(&["region", "nowhere", "1/2", "1/2", "1/2"])), 2);
    assert_eq!(code(&run(&["region", "d24", "3/2", "1/2"])), 2);
}

#[test]
fn solve_flags_points_outside_the_image() {
    let o = run(&["solve", "3/7", "3/7", "6/7", "1"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["in_polyhedron"], true);
    assert_eq!(v["case_formulas"]["inverts"], false);

    let o = run(&["solve", "1/5", "2/5", "9/10", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["sigma"]["alpha2"], "1/2");
}

#[test]
fn scan_gates_and_slabs() {
    assert_eq!(code(&run(&["scan", "--resolution", "3"])), 2);

    let o = run(&["scan", "--resolution", "4", "--slab", "d<1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1, "header only");

    let o = run(&["scan", "--resolution", "20"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() > 2);
    assert!(text.lines().any(|l| l.starts_with("3/7,3/7,6/7,1,")));
}

#[test]
fn profile_exit_codes() {
    let o = run(&["profile", "kind=full_interval", "n=1000000"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for key in ["config", "checkpoints", "profile_estimate", "predicted", "deviations", "seed", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["ldens_A", "udens_A", "ldens_2A", "udens_2A"] {
        assert_eq!(v["profile_estimate"][key], 1.0);
    }

    let o = run(COMPOSITE);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["predicted"]["udens_2A"], 1.0);

    let strict: Vec<&str> = COMPOSITE.iter().copied().chain(["--tolerance", "0"]).collect();
    assert_eq!(code(&run(&strict)), 1);

    let o = run(&["profile", "kind=composite", "alpha1=1/2", "alpha2=2/5", "beta1=1", "beta2=1", "ratio=16", "depth=5", "a0=1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha1"));

    assert_eq!(code(&run(&["profile", "kind=th23", "beta=4", "depth=4", "--ratio", "16"])), 2);
}

#[test]
fn seed_precedence() {
    let seed_of = |args: &[&str], env: Option<&str>| json(&run_with(args, env))["seed"].as_u64();
    let with_flag: Vec<&str> = COMPOSITE.iter().copied().chain(["--seed", "5"]).collect();
    assert_eq!(seed_of(COMPOSITE, Some("11")), Some(11));
    assert_eq!(seed_of(&with_flag, Some("11")), Some(5));
    assert_eq!(code(&run_with(COMPOSITE, Some("eleven"))), 2);
}

#[test]
fn record_reruns_from_its_config_echo() {
    let first = json(&run(COMPOSITE));
    let dir = std::env::temp_dir().join(format!("density-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("echo.json");
    std::fs::write(&path, first["config"].to_string()).unwrap();
    let second = json(&run(&["profile", path.to_str().unwrap()]));
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(first["profile_estimate"], second["profile_estimate"]);
    assert_eq!(first["checkpoints"], second["checkpoints"]);
}

#[test]
fn csv_outputs() {
    let o = run(&["profile", "kind=full_interval", "n=4096", "--format", "csv"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("kind,name,x,count,value,predicted,deviation\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("estimate,")).count(), 4);

    let o = run(&["montecarlo", "basic", "--i-len", "16", "--j-len", "16", "-r", "2,4", "-p", "1", "-q", "1", "--trials", "400", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("sweep.1.stats.failures,0"));
}

#[test]
fn montecarlo_gates() {
    let o = run(&["montecarlo", "cor", "--m", "100", "--n", "100", "-p", "0.9", "-q", "0.9", "--epsilon", "0.1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));

    let o = run(&["montecarlo", "dens0", "kind=thinned", "alpha=1/2", "ratio=20", "depth=5", "t0=1", "beta=0.7", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["final_density"].as_f64().unwrap() <= 0.02);

    assert_eq!(code(&run(&["montecarlo", "dens0", "kind=th23", "beta=4", "depth=4"])), 2);
}

#[test]
fn discrepancy_reports() {
    let o = run(&["discrepancy", "--n", "1000,10000,100000"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["exponent"].as_f64().unwrap() < 0.0);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);

    let o = run(&["discrepancy", "--n", "1000", "--m", "10", "--theta", "sqrt2m1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["m_used"], 10);

    assert_eq!(code(&run(&["discrepancy", "--theta", "pi"])), 2);
}
