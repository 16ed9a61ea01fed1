use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fluxindex(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxindex"))
        .args(args)
        .current_dir(dir)
        .env_remove("FLUXINDEX_THREADS")
        .output()
        .expect("binary runs")
}

fn summary(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = fluxindex(&full, dir.path());
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {text}\nstderr: {}", String::from_utf8_lossy(&out.stderr))
    });
    (code, value)
}

fn exit_code(args: &[&str], dir: &Path) -> i32 {
    fluxindex(args, dir).status.code().unwrap()
}

const PROJECTION_3: &str = "\
# projection onto (1, i, 0) / sqrt 2
3 3
0.5 0    0 -0.5  0 0
0 0.5    0.5 0   0 0
0 0      0 0     0 0
";

#[test]
fn shift_example_has_index_minus_one() {
    let (code, s) = summary(&["index-pair", "--example", "shift", "--sites", "41"]);
    assert_eq!(code, 0);
    assert_eq!(s["result"]["index_eig"], -1);
    assert!(s["result"]["agreement_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(s["schema_version"], 1);
}

#[test]
fn random_pair_formulas_agree() {
    let (code, s) = summary(&["index-pair", "--example", "random", "--dim", "64", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(s["seed"], 7);
    let expected = s["result"]["index_eig"].as_f64().unwrap();
    for t in s["result"]["trace_powers"].as_array().unwrap() {
        assert!((t["value"].as_f64().unwrap() - expected).abs() < 1e-8);
    }
    assert!((s["result"]["arveson"].as_f64().unwrap() - expected).abs() < 1e-8);
}

#[test]
fn identical_matrix_files_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("A.mat"), PROJECTION_3).unwrap();
    let out = fluxindex(&["--json", "index-pair", "--p", "A.mat", "--q", "A.mat"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["result"]["index_eig"], 0);
    assert_eq!(s["result"]["rank_p"], 1);
}

#[test]
fn dimer_tails_separate_squares_from_cubes() {
    let (code, s) = summary(&["index-pair", "--example", "dimer"]);
    assert_eq!(code, 0);
    let tails = &s["result"]["relative_tails"];
    assert!(tails["cubes"].as_f64().unwrap() < 1e-3);
    assert!(tails["squares"].as_f64().unwrap() >= 1e-3);
}

#[test]
fn correspondence_examples() {
    let (code, s) = summary(&["correspondence", "--example", "shift", "--modes", "9"]);
    assert_eq!(code, 0);
    let t = &s["result"]["trials"][0];
    assert_eq!(t["index_eig"], -1);
    assert!((t["many_body"].as_f64().unwrap() + 1.0).abs() < 1e-7);

    let (code, s) = summary(&["correspondence", "--example", "equal", "--trials", "5"]);
    assert_eq!(code, 0);
    assert!(s["result"]["trials"].as_array().unwrap().iter().all(|t| t["index_eig"] == 0));

    let (code, s) = summary(&["correspondence", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(s["result"]["agreed"], 50);
}

#[test]
fn chern_sign_follows_the_flux() {
    let (_, up) = summary(&["chern"]);
    let (_, down) = summary(&["chern", "--alpha", "-0.3333333333333333"]);
    assert_eq!(up["result"]["chern"], 1);
    assert_eq!(down["result"]["chern"], -1);
}

#[test]
fn planted_stacked_index() {
    let (code, s) = summary(&["stacked-index", "--example", "planted", "--n-plus", "2", "--n-minus", "0"]);
    assert_eq!(code, 0);
    assert_eq!(s["result"]["index_eig"], -2);
    assert!(s["result"]["residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn atomic_flux_sweep_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "flux-sweep", "--preset", "atomic", "--width", "8", "--height", "8", "--mu", "0",
        "--cells", "8", "--chern-bands", "2", "--out", "out",
    ];
    assert_eq!(exit_code(&args, dir.path()), 0);
    let s: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/flux_sweep.json")).unwrap()).unwrap();
    let r = &s["result"];
    assert_eq!((r["net_flow"].as_i64(), r["local_flow"].as_i64(), r["chern"].as_i64()), (Some(0), Some(0), Some(0)));
    assert!(r["crossings"].as_array().unwrap().is_empty());
    assert!(r["charge_deficiency"].as_f64().unwrap().abs() < 1e-10);
    let csv = std::fs::read_to_string(dir.path().join("out/flux_sweep_spectrum.csv")).unwrap();
    assert!(csv.starts_with("phi,branch,eigenvalue\n"));
}

#[test]
fn summaries_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let sweep = [
        "flux-sweep", "--preset", "atomic", "--width", "6", "--height", "6", "--mu", "0",
        "--cells", "6", "--chern-bands", "2",
    ];
    for (run, threads) in [("a", "1"), ("b", "3")] {
        let mut args = sweep.to_vec();
        args.extend(["--out", run]);
        let status = Command::new(env!("CARGO_BIN_EXE_fluxindex"))
            .args(&args)
            .current_dir(dir.path())
            .env("FLUXINDEX_THREADS", threads)
            .stdout(Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        let random = ["index-pair", "--example", "random", "--dim", "32", "--seed", "11", "--out", run];
        assert_eq!(exit_code(&random, dir.path()), 0);
    }
    for name in ["flux_sweep.json", "flux_sweep_spectrum.csv", "index_pair.json"] {
        assert_eq!(read(&format!("a/{name}")), read(&format!("b/{name}")), "{name}");
    }
}

#[test]
fn annotated_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/run.toml");
    let config = config.to_str().unwrap();
    assert_eq!(exit_code(&["--config", config, "index-pair"], dir.path()), 0);
    let s: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("results/index_pair.json")).unwrap()).unwrap();
    assert_eq!(s["seed"], 7);
    assert_eq!(s["result"]["index_eig"], -1);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("typo.toml"), "schema_version = 1\n[flux_sweep]\ncels = 3\n").unwrap();
    std::fs::write(p.join("old.toml"), "schema_version = 0\n").unwrap();
    std::fs::write(p.join("notproj.mat"), "2 2\n1 0 1 0\n0 0 1 0\n").unwrap();
    std::fs::write(p.join("A.mat"), PROJECTION_3).unwrap();
    assert_eq!(exit_code(&["--config", "typo.toml", "chern"], p), 2);
    assert_eq!(exit_code(&["--config", "old.toml", "chern"], p), 2);
    assert_eq!(exit_code(&["--config", "missing.toml", "chern"], p), 2);
    assert_eq!(exit_code(&["index-pair", "--p", "notproj.mat", "--q", "notproj.mat"], p), 2);
    assert_eq!(exit_code(&["index-pair", "--p", "A.mat", "--q", "nowhere.mat"], p), 2);
    assert_eq!(exit_code(&["index-pair", "--example", "nothing"], p), 2);
    assert_eq!(exit_code(&["index-pair", "--tol", "-1"], p), 2);
    assert_eq!(exit_code(&["correspondence", "--modes", "20"], p), 2);
    assert_eq!(exit_code(&["no-such-command"], p), 2);
}

#[test]
fn coarse_grid_without_refinement_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "flux-sweep", "--width", "18", "--height", "18", "--probe-radius", "5", "--cells", "2",
        "--max-bisections", "0", "--chern-bands", "0",
    ];
    let out = fluxindex(&args, dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("could not resolve eigenvalue branch"));
}

#[test]
fn violated_identity_exits_with_4_and_still_writes_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    // on an 18 x 18 patch the local deficiency is about 7% short of the flow
    let args = [
        "flux-sweep", "--width", "18", "--height", "18", "--probe-radius", "5", "--cells", "24",
        "--chern-bands", "0", "--tol", "0.01", "--out", "out",
    ];
    assert_eq!(exit_code(&args, dir.path()), 4);
    let s: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/flux_sweep.json")).unwrap()).unwrap();
    assert_eq!(s["passed"], false);
    assert_eq!(s["result"]["local_flow"].as_i64().unwrap().abs(), 1);
}
