use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_p2p-reins"))
}

fn baseline() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/baseline.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("P2P_LOG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn tables_on_baseline() {
    let cfg = baseline();
    let o = run(&["tables", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# table1_loadings\ncontract,eta_1,eta_2,eta_3\n"));
    assert!(text.contains("\nBO2,0.14891352631485988,0.44559450643109777,0.24419921929725252\n"));
    assert!(text.contains("\nJPO2,0.4395,0.4395,0.4395\n"));
    assert!(!text.contains('\r'));
    assert!(o.stderr.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = baseline();
    for cmd in ["tables", "sweep", "validate", "game", "pareto", "bowley"] {
        for fmt in ["csv", "json"] {
            let a = run(&[cmd, "--config", cfg.to_str().unwrap(), "--format", fmt]);
            let b = run(&[cmd, "--config", cfg.to_str().unwrap(), "--format", fmt]);
            assert_eq!(a.stdout, b.stdout, "{cmd} {fmt}");
            assert_eq!(a.status.code(), Some(0), "{cmd} {fmt}");
        }
    }
}

#[test]
fn game_json_document() {
    let cfg = baseline();
    let o = run(&["game", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["values"].as_object().unwrap().len(), 16);
    assert!((v["values"]["15"].as_f64().unwrap() - 268.951373).abs() < 1e-6);
    assert_eq!(v["values"]["9"].as_f64().unwrap(), 45.0);
}

#[test]
fn core_check_exit_codes() {
    let cfg = baseline();
    let c = cfg.to_str().unwrap();
    let o = run(&["core-check", "53.1558,121.383,58.4651,35.9478", "--config", c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("in_core,true"));
    // The Bowley welfare vector is short of B(N).
    let o = run(&["core-check", "51.9859,120.213,57.2952,34.7780", "--config", c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("in_core,false"));
    let o = run(&["core-check", "1,2", "--config", c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 4 values"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["tables"]);
    assert_eq!(o.status.code(), Some(1));
    let p = write_config(&dir, "npd.json", r#"{"schema_version":"1","mu":[1,1],"sigma":[[1,2],[2,1]],"gamma":[1,1],"gamma_r":0}"#);
    let o = run(&["pareto", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not positive definite"));
    let p = write_config(&dir, "bad.json", r#"{"schema_version":"1","mu":[1,1],"sigma":[[1,0],[0,true]],"gamma":[1,1],"gamma_r":0}"#);
    let o = run(&["pareto", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma[1][1]"));
    let o = run(&["pareto", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_rows_ascend() {
    let cfg = baseline();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("gamma_r,JPO_p_1"));
    let g: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(g.len(), 30);
    assert!(g.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn out_file_and_logging() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = baseline();
    let out = dir.path().join("t.csv");
    let o = run(&["tables", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let plain = run(&["tables", "--config", cfg.to_str().unwrap()]);
    assert_eq!(std::fs::read(&out).unwrap(), plain.stdout);

    let logged = bin().args(["tables", "--config", cfg.to_str().unwrap()]).env("P2P_LOG", "debug").output().unwrap();
    assert_eq!(logged.stdout, plain.stdout);
    assert!(!logged.stderr.is_empty());
}

#[test]
fn jpo2_default_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(baseline()).unwrap().replace("\"jpo2_t\": 0.4395,", "");
    let p = write_config(&dir, "nojpo2.json", &text);
    let o = run(&["tables", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().find(|l| l.starts_with("JPO2,")).unwrap().to_string();
    let t: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    // Midpoint of the feasible window, roughly [0.4381, 0.4398].
    assert!((t - 0.43895).abs() < 1e-4, "{t}");

    let o = run(&["tables", "--config", baseline().to_str().unwrap(), "--jpo2-t", "0.439"]);
    assert!(stdout(&o).contains("\nJPO2,0.439,0.439,0.439\n"));
}

#[test]
fn bowley_single_loading_flag() {
    let cfg = baseline();
    let o = run(&["bowley", "--single-loading", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("single_loading,0.49505014867559655"));
    let o = run(&["bowley", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let members = v["tables"]["bowley_members"].as_array().unwrap();
    assert!((members[1]["eta"].as_f64().unwrap() - 0.7259183).abs() < 1e-6);
}

#[test]
fn validate_reports_everything() {
    let cfg = baseline();
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["conditions"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["unicond2", "WGcond", "coreBound", "BO1.MIRcond", "BO1.deltaINE", "BO2.single_loading_nonneg", "bound.spectral_rigorous", "stable.JPO1"] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn required_failure_exits_two() {
    // Infinite-ish reinsurer risk aversion: nothing is ceded and the
    // interior condition on the Pareto cession fails.
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(baseline()).unwrap().replace("\"gamma_r\": 0.01", "\"gamma_r\": 1000000");
    let p = write_config(&dir, "big.json", &text);
    let o = run(&["pareto", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("unicond2,fail,required"));
}
