use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blowup"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Copies a shipped config into `dir`, replacing the `sim.*` keys given.
fn config_with(dir: &Path, name: &str, sim: &[(&str, &str)]) -> PathBuf {
    let text = fs::read_to_string(repo_config(name)).unwrap();
    let mut out = String::new();
    for line in text.lines() {
        let key = line.split('=').next().unwrap().trim();
        match sim.iter().find(|(k, _)| *k == key) {
            Some((k, v)) => out.push_str(&format!("{k} = {v}\n")),
            None => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    for (k, v) in sim {
        if !text.lines().any(|l| l.split('=').next().unwrap().trim() == *k) {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    let path = dir.join(name);
    fs::write(&path, out).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn validate(schema: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema);
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{doc:#}");
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

const SIMULATE_HEADER: &str = "path_id,tau_lower,lower_status,tau_upper,upper_status,tau_ode,ode_status";
const SANDWICH_HEADER: &str = "path_id,tau_lower,lower_status,tau_ode,ode_status,tau_upper,upper_status,ok";

#[test]
fn thresholds_match_schema_for_every_shipped_config() {
    for name in ["equal.cfg", "two_level.cfg", "general.cfg", "strict_chain.cfg", "two_noise.cfg"] {
        let cfg = repo_config(name);
        let out = run(&["thresholds", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        validate("thresholds.schema.json", &json_of(&out));
    }
}

#[test]
fn equal_exponent_thresholds() {
    let out = run(&["thresholds", "--config", repo_config("equal.cfg").to_str().unwrap()]);
    let j = json_of(&out);
    assert_eq!(j["case"], "equal_exponents");
    assert!((j["theta_lower"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((j["theta_upper"].as_f64().unwrap() - 8.0 / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn simulate_and_sandwich_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, sandwich) in [("equal.cfg", false), ("two_noise.cfg", true), ("general.cfg", true)] {
        let cfg = config_with(dir.path(), name, &[("sim.n_paths", "20"), ("sim.horizon", "2")]);
        let csv = dir.path().join(format!("{name}.csv"));
        let json = dir.path().join(format!("{name}.json"));
        let cmd = if sandwich { "ode-sandwich" } else { "simulate" };
        let out = run(&[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--out-csv",
            csv.to_str().unwrap(),
            "--out-json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(&csv).unwrap();
        let mut lines = text.lines();
        let header = if sandwich { SANDWICH_HEADER } else { SIMULATE_HEADER };
        assert_eq!(lines.next(), Some(header));
        assert_eq!(lines.count(), 20);
        let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
        let schema = if sandwich { "ode_sandwich.schema.json" } else { "simulate.schema.json" };
        validate(schema, &doc);
        assert_eq!(doc["n_paths"], 20);
    }
}

#[test]
fn zero_noise_sandwich_reproduces_the_deterministic_times() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), "equal.cfg", &[("sim.n_paths", "3")]);
    let out = run(&["ode-sandwich", "--zero-noise", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let pi = std::f64::consts::PI;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let tau = |i: usize| f[i].parse::<f64>().unwrap();
        assert!((tau(1) - 1.0 / 3.0).abs() < 1e-3, "{line}");
        assert!((tau(3) - 4.0 / pi).abs() < 1e-3, "{line}");
        assert!((tau(5) - 8.0 / pi).abs() < 1e-3, "{line}");
        assert_eq!(f[7], "1");
    }
}

#[test]
fn worker_count_does_not_change_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), "two_level.cfg", &[("sim.n_paths", "64"), ("sim.horizon", "1")]);
    let mut outputs = Vec::new();
    for w in ["1", "8"] {
        let out = run(&["simulate", "--workers", w, "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn single_path_run_is_the_first_row_of_a_larger_run() {
    let dir = tempfile::tempdir().unwrap();
    let one = config_with(dir.path(), "equal.cfg", &[("sim.n_paths", "1"), ("sim.horizon", "2")]);
    let a = run(&["simulate", "--config", one.to_str().unwrap()]);
    let sub = tempfile::tempdir().unwrap();
    let many = config_with(sub.path(), "equal.cfg", &[("sim.n_paths", "5"), ("sim.horizon", "2")]);
    let b = run(&["simulate", "--config", many.to_str().unwrap()]);
    let a = String::from_utf8(a.stdout).unwrap();
    let b = String::from_utf8(b.stdout).unwrap();
    assert_eq!(a.lines().nth(1), b.lines().nth(1));
}

#[test]
fn unwritable_output_fails_without_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), "equal.cfg", &[("sim.n_paths", "4"), ("sim.horizon", "1")]);
    let out_dir = tempfile::tempdir().unwrap();
    let csv = out_dir.path().join("s.csv");
    let json = out_dir.path().join("no_such_dir").join("s.json");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_dir(out_dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_config_is_rejected_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "exponents.m = 1\nexponents.zz = 2\n").unwrap();
    let out = run(&["thresholds", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_upper_bound_degrades_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), "strict_chain.cfg", &[("sim.n_paths", "4"), ("sim.horizon", "1")]);
    let text = fs::read_to_string(&cfg).unwrap().replace("init.C1 = 16", "init.C1 = 2").replace("init.C2 = 16", "init.C2 = 2");
    fs::write(&cfg, text).unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let csv = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "");
    assert_eq!(row[4], "unavailable");

    let out = run(&["probability", "--case", "3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let j = json_of(&out);
    validate("probability.schema.json", &j);
    assert_eq!(j["vacuous"], true);
}

#[test]
fn probability_cases() {
    let dir = tempfile::tempdir().unwrap();
    for (name, case) in [("equal.cfg", "1"), ("two_level.cfg", "2"), ("strict_chain.cfg", "3")] {
        let cfg = config_with(dir.path(), name, &[("sim.n_paths", "200")]);
        let out = run(&["probability", "--case", case, "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let j = json_of(&out);
        validate("probability.schema.json", &j);
        assert_eq!(j["case"].as_u64().unwrap().to_string(), case);
    }
    let out = run(&["probability", "--case", "1", "--config", repo_config("equal.cfg").to_str().unwrap()]);
    let p = json_of(&out)["closed_form"].as_f64().unwrap();
    assert!((p - 0.99143).abs() < 1e-4, "{p}");

    let out = run(&["probability", "--case", "2", "--config", repo_config("equal.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn yor_check_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), "yor.cfg", &[("sim.n_paths", "200"), ("sim.dt", "1e-2"), ("sim.horizon", "10")]);
    let out = run(&["yor-check", "--nu", "4", "--config", cfg.to_str().unwrap()]);
    assert!(matches!(out.status.code(), Some(0) | Some(2)), "{}", String::from_utf8_lossy(&out.stderr));
    let j = json_of(&out);
    validate("yor_check.schema.json", &j);
    assert_eq!(j["nu"], 4.0);

    let out = run(&["yor-check", "--nu", "1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_noise_reference_is_certified() {
    let out = run(&["compare-noise", "--config", repo_config("compare.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let j = json_of(&out);
    validate("compare_noise.schema.json", &j);
    assert_eq!(j["certified"], true);
    assert!(j["hypotheses"].as_array().unwrap().iter().all(|h| h["holds"] == true));
    assert_eq!(j["K"], 3.0);
}
