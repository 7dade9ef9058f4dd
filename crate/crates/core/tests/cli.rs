use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coco-contagion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn solve_prints_equilibrium_json() {
    let out = run(&[
        "solve",
        "--topology",
        "ring",
        "--n",
        "50",
        "--a",
        "21",
        "--s",
        "20",
        "--y",
        "75",
        "--eps",
        "60",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["extent"], 1.0);
    assert!((v["distress"].as_f64().unwrap() - 0.673333).abs() < 1e-6);
    for key in ["phi", "extent", "distress", "iterations", "residual"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn thresholds_reference_values() {
    let out = run(&["thresholds", "--n", "50", "--a", "21", "--s", "20"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["eps_star"], 50.0);
    assert_eq!(v["y_star"], 49.0);
}

#[test]
fn generated_network_feeds_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rr.txt");
    let p = path.to_str().unwrap();
    let out = run(&[
        "generate",
        "--topology",
        "regular(3)",
        "--n",
        "20",
        "--y",
        "75",
        "--seed",
        "7",
        "-o",
        p,
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("20 75 regular(3) 7\n"));
    let out = run(&["solve", "--network", p, "--eps", "10", "--tau", "0.008", "--eta", "0.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["phi"].as_array().unwrap().len(), 20);
    assert!(v["phi"].as_array().unwrap().iter().all(|p| p.as_f64().unwrap() >= 0.3));
}

#[test]
fn sweep_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "n = 16\ntopologies = [\"ring\"]\nc_list = [3]\nrealizations = 3\neps_step = 5.0\n",
    )
    .unwrap();
    let sweep = |tag: &str, seed: &str, extra: &[&str]| {
        let out_dir = dir.path().join(tag);
        let mut args = vec![
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(out_dir.join("sweep_vanilla.csv")).unwrap()
    };
    let first = sweep("a", "11", &[]);
    assert_eq!(first, sweep("b", "11", &["--sequential"]));
    assert_ne!(first, sweep("c", "12", &[]));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/sweep_vanilla.json")).unwrap()).unwrap();
    assert_eq!(meta["master_seed"], 11);
}

#[test]
fn phase_and_eta_curve_from_shipped_configs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let eta = configs().join("eta_curve.toml");
    let out = run(&["eta-curve", "--config", eta.to_str().unwrap(), "--out", out_dir]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("eta_curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 20);

    let phase = configs().join("safe_regions.toml");
    let out = run(&["phase", "--config", phase.to_str().unwrap(), "--out", out_dir]);
    assert!(out.status.success());
    for tau in ["0.001", "0.004", "0.008", "0.02"] {
        let csv = std::fs::read_to_string(dir.path().join(format!("phase_tau{tau}.csv"))).unwrap();
        assert_eq!(csv.lines().nth(1), Some("y,eps,ring_safe,complete_safe"));
        assert_eq!(csv.lines().count(), 2 + 200 * 201);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--topology", "ring"]).status.code(), Some(1));
    assert_eq!(
        run(&["solve", "--topology", "torus", "--eps", "1"]).status.code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "n = 50\nwibble = 3\n").unwrap();
    let out = run(&["sweep", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wibble"));

    let out = run(&["solve", "--topology", "complete", "--eps", "30", "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
