use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sawtooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sawtooth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn zero_steps_give_header_only_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sawtooth(&["single", "--nq", "4", "--t-max", "0", "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("series_nq4_K0.5_L4_eps0.csv")).unwrap();
    assert_eq!(csv, "t,C,W00,W01,W10,W11,Q14,Q23,norm\n");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("skipped"));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn seeded_noisy_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sawtooth(&[
            "single", "--nq", "6", "--t-max", "150", "--eps", "0.02", "--seed", "11", "--out", &out_arg(&out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(out.join("series_nq6_K0.5_L4_eps0.02_r0.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 151);
}

#[test]
fn manifest_lists_outputs_with_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = sawtooth(&["single", "--nq", "5", "--t-max", "120", "--format", "json", "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    let files: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert!(files.contains(&"series_nq5_K0.5_L4_eps0.json"));
    assert!(files.contains(&"summary.csv") && files.contains(&"summary.json"));
    assert_eq!(m["runs"].as_array().unwrap().len(), 1);
    let series: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("series_nq5_K0.5_L4_eps0.json")).unwrap()).unwrap();
    assert_eq!(series["records"].as_array().unwrap().len(), 120);
}

#[test]
fn validation_errors_exit_one_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    for args in [
        vec!["single", "--L", "6"],
        vec!["single", "--nq", "21"],
        vec!["single", "--eps", "-0.1"],
        vec!["noise-scaling", "--realizations", "0"],
        vec!["single", "--nq", "20", "--t-max", "100000000"],
        vec!["single", "--unknown-flag"],
        vec!["gamma-vs-k", "--K", ""],
    ] {
        let mut full = args.clone();
        let o = out_arg(&out);
        full.extend(["--out", o.as_str()]);
        let r = sawtooth(&full);
        assert_eq!(r.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(!out.exists(), "{args:?} created output");
    }
}

#[test]
fn fit_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fail");
    // Plateau onset beyond the last smoothed point leaves nothing to fit.
    let o = sawtooth(&[
        "noise-single", "--nq", "4", "--t-max", "150", "--realizations", "2", "--plateau-start", "140",
        "--trajectories", "1000", "--out", &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("noise_rates.csv")).unwrap();
    assert!(table.contains("error"));
}

#[test]
fn single_grid_point_skips_scaling_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = sawtooth(&[
        "residual-vs-g", "--nq", "5", "--t-max", "400", "--plateau-start", "100", "--trajectories", "1000",
        "--d0-t-max", "50", "--out", &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("scaling fit skipped"));
    assert!(out.join("residual_vs_g.csv").exists());
    assert!(!out.join("scaling.csv").exists());
}

#[test]
fn classical_table_has_one_row_per_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = sawtooth(&[
        "classical-d0", "--K", "0.5,2", "--trajectories", "2000", "--d0-t-max", "100", "--out", &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("classical_d0.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    let k: f64 = text.lines().nth(2).unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(k, 2.0);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = sawtooth(&[
            "noise-scaling", "--nq", "4,5", "--eps", "0,0.05", "--t-max", "400", "--realizations", "3",
            "--plateau-start", "100", "--trajectories", "1000", "--d0-t-max", "50", "--workers", workers, "--out",
            &out_arg(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (
            fs::read(out.join("noise_rates.csv")).unwrap(),
            fs::read(out.join("noise_nq5_K0.5_L4_eps0.05.csv")).unwrap(),
        )
    };
    assert_eq!(run("w1", "1"), run("w3", "3"));
}
