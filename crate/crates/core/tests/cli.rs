use std::path::{Path, PathBuf};

use magnon_bistability::cli::run;
use serde_json::Value;

fn magbist(args: &[&str]) -> i32 {
    let mut argv = vec!["magbist".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = out_path(dir, name);
    let mut all = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.push("--out");
    all.push(&p);
    let code = magbist(&all);
    (code, std::fs::read_to_string(&path).unwrap_or_default())
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn validate_lists_violations_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gamma_a_mhz": -1.0, "detuning_scale_mhz": 0.0}"#).unwrap();
    let (code, text) = run_to_file(dir.path(), "v.txt", &["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(text.lines().filter(|l| l.starts_with("violation")).count(), 2);

    let (code, text) = run_to_file(dir.path(), "ok.txt", &["validate"]);
    assert_eq!(code, 0);
    assert_eq!(text, "ok\n");
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    std::fs::write(&cfg, r#"{"gama_a_mhz": 5.0}"#).unwrap();
    assert_eq!(magbist(&["threshold", "--config", cfg.to_str().unwrap()]), 1);
}

#[test]
fn bad_grid_is_a_usage_error() {
    assert_eq!(magbist(&["spectrum", "--grid", "1:0"]), 1);
    assert_eq!(magbist(&["spectrum", "--grid", "0:1:1"]), 1);
}

#[test]
fn threshold_ratio_for_equal_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"gamma_a_mhz": 0.0, "gamma_b_mhz": 0.0, "coupling_gamma_mhz": 5.0, "coupling_g_mhz": 5.0}"#,
    )
    .unwrap();
    let (code, text) = run_to_file(dir.path(), "t.csv", &["threshold", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let ratio: f64 = column(&text, "threshold_ratio")[0].parse().unwrap();
    assert!((ratio - 0.216).abs() < 1e-12);
    assert_eq!(column(&text, "window_exists")[0], "0");
}

#[test]
fn csv_output_gets_a_meta_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run_to_file(dir.path(), "h.csv", &["hysteresis", "--grid", "0:40:11"]);
    assert_eq!(code, 0);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("h.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "hysteresis");
    assert_eq!(meta["config"]["sweeps"][0]["axis"], "pump");
    assert_eq!(meta["config"]["sweeps"][0]["count"], 11);
}

#[test]
fn output_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["eigens", "--pump-mw", "20", "--grid", "-10:-1:37"];
    let (c1, one) = run_to_file(dir.path(), "w1.csv", &[&args[..], &["--workers", "1"]].concat());
    let (c4, four) = run_to_file(dir.path(), "w4.csv", &[&args[..], &["--workers", "4"]].concat());
    assert_eq!((c1, c4), (0, 0));
    assert_eq!(one, four);
    assert_eq!(one.lines().count(), 38);
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, first) = run_to_file(
        dir.path(),
        "s.json",
        &["spectrum", "--format", "json", "--pump-mw", "2", "--delta-scaled", "-3", "--grid", "-2:2:41"],
    );
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&first).unwrap();
    let echoed = dir.path().join("echo.json");
    let mut cfg = doc["meta"]["config"].clone();
    cfg["output"] = Value::Null;
    std::fs::write(&echoed, serde_json::to_string(&cfg).unwrap()).unwrap();
    let (code, second) = run_to_file(dir.path(), "s2.json", &["spectrum", "--config", echoed.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc2: Value = serde_json::from_str(&second).unwrap();
    assert_eq!(doc["rows"], doc2["rows"]);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 41);
}

#[test]
fn map2d_single_row_equals_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, sp) = run_to_file(
        dir.path(),
        "sp.csv",
        &["spectrum", "--pump-mw", "3", "--delta-scaled", "-4", "--grid", "-3:3:25"],
    );
    let (c2, map) = run_to_file(
        dir.path(),
        "map.csv",
        &[
            "map2d", "--pump-mw", "3", "--x", "delta", "--x-grid", "-4:-4:1", "--y", "delta_p", "--y-grid", "-3:3:25",
        ],
    );
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(column(&sp, "abs_t"), column(&map, "abs_t"));
    assert_eq!(column(&sp, "delta_p_scaled"), column(&map, "delta_p_scaled"));
}

#[test]
fn steady_rows_follow_root_count() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(dir.path(), "st.csv", &["steady", "--delta-scaled", "-8", "--pump-mw", "20"]);
    assert_eq!(code, 0);
    assert_eq!(column(&text, "stable"), ["1", "0", "1"]);
}

#[test]
fn relax_reaches_the_lowest_branch() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "r.csv",
        &["relax", "--delta-scaled", "-8", "--pump-mw", "20", "--t-gamma", "60", "--samples", "11"],
    );
    assert_eq!(code, 0);
    let (_, steady) = run_to_file(dir.path(), "st.csv", &["steady", "--delta-scaled", "-8", "--pump-mw", "20"]);
    let last = text.lines().last().unwrap().split(',').map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>();
    let re_b0: f64 = column(&steady, "re_b0")[0].parse().unwrap();
    let im_b0: f64 = column(&steady, "im_b0")[0].parse().unwrap();
    assert!(((last[3] - re_b0).powi(2) + (last[4] - im_b0).powi(2)).sqrt() < 1e-6 * re_b0.hypot(im_b0));
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(magbist(&["--version"]), 0);
    assert_eq!(magbist(&["frobnicate"]), 1);
}
