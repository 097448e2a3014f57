use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rotlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotlab"))
        .args(args)
        .env_remove("ROTLAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows of an alpha table.
fn table(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn alpha_golden_is_fibonacci() {
    let o = rotlab(&["alpha", "--golden", "-N", "10"]);
    assert_eq!(code(&o), 0);
    let q: Vec<u64> = table(&o).iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(q, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
}

#[test]
fn alpha_ead_reproducible() {
    let a = rotlab(&["alpha", "--ead", "A=5,d=2,seed=1", "-N", "10"]);
    let b = rotlab(&["alpha", "--ead", "A=5,d=2,seed=1", "-N", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let rows = table(&a);
    assert_eq!(rows.len(), 11);
    for r in &rows[1..] {
        let a_n: u64 = r[1].parse().unwrap();
        assert!((5..=10).contains(&a_n));
    }
    // --seed fills in a missing seed
    let c = rotlab(&["alpha", "--ead", "A=5,d=2", "--seed", "1", "-N", "10"]);
    assert_eq!(c.stdout, a.stdout);
    let d = rotlab(&["alpha", "--ead", "A=5,d=2", "-N", "10"]);
    assert_eq!(code(&d), 2);
}

#[test]
fn alpha_explicit_too_short() {
    let o = rotlab(&["alpha", "--explicit", "2,2,2", "-N", "5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exhausted"));
    let ok = rotlab(&["alpha", "--explicit", "2,2,2", "-N", "3"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn usage_errors() {
    let tmp = TempDir::new().unwrap();
    let empty = write_config(tmp.path(), "empty.json", "{}");
    let out = tmp.path().join("out");
    let o = rotlab(&["experiment", "--config", &empty, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&rotlab(&["experiment"])), 2);
    assert_eq!(code(&rotlab(&["alpha"])), 2);
    let no_plan = write_config(tmp.path(), "np.json", r#"{"alpha":{"kind":"periodic","period":[1]}}"#);
    assert_eq!(code(&rotlab(&["experiment", "--config", &no_plan, "--out", out.to_str().unwrap()])), 2);
    assert!(!out.join("stages.csv").exists());
}

#[test]
fn golden_experiment_degenerates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"r_sequence","n":12}}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("stage ")).count(), 12);
    let csv = fs::read_to_string(out.join("stages.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,r_n,sigma_n,sigma_lo,sigma_hi,ks,m2,m4,char_gap_at_lambda1");
    for (j, row) in rows[1..].iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        let sigma_hi: f64 = f[4].parse().unwrap();
        // sup |y_{r_j}| <= 6
        assert!(sigma_hi <= 6.0 / ((j + 1) as f64).sqrt() + 1e-12);
    }
    for name in ["plan.json", "experiment.json", "law_n12.csv", "hist_n12.dat"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn constant_ten_sigma_range() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "a.json",
        r#"{"alpha":{"kind":"ead","a":10,"d":1,"seed":3},"plan":{"kind":"r_sequence","n":6}}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(out.join("stages.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(r[2] >= 0.3 && r[2] <= 4.0, "sigma {}", r[2]);
        assert!(r[5] > 0.0 && r[5] < 1.0);
    }
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"greedy","j":4},"seed":5}"#,
    );
    let mut dirs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("out{k}"));
        assert_eq!(code(&rotlab(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
        assert_eq!(code(&rotlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()])), 1);
        dirs.push(out);
    }
    let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 11);
    for name in &names {
        let a = fs::read(dirs[0].join(name)).unwrap();
        let b = fs::read(dirs[1].join(name)).unwrap();
        assert_eq!(a, b, "{name:?}");
    }
}

#[test]
fn every_file_has_header() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[2]},"plan":{"kind":"r_sequence","n":4}}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(code(&rotlab(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let plan: Value = serde_json::from_str(&fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
    let hash = plan["header"]["config_sha256"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert_eq!(plan["header"]["version"], env!("CARGO_PKG_VERSION"));
    for e in fs::read_dir(&out).unwrap() {
        let path = e.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if path.extension().unwrap() == "json" {
            let v: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["header"]["config_sha256"], hash.as_str(), "{path:?}");
        } else {
            assert!(text.starts_with("# rotlab "), "{path:?}");
            assert!(text.contains(&format!("# config_sha256 {hash}\n")), "{path:?}");
        }
    }
    // a flag changes the effective config and so the hash
    let out2 = tmp.path().join("out2");
    assert_eq!(
        code(&rotlab(&["experiment", "--config", &cfg, "--seed", "7", "--out", out2.to_str().unwrap()])),
        0
    );
    let plan2: Value = serde_json::from_str(&fs::read_to_string(out2.join("plan.json")).unwrap()).unwrap();
    assert_ne!(plan2["header"]["config_sha256"], hash.as_str());
}

#[test]
fn horizon_flag_too_small() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"r_sequence","n":10}}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["experiment", "--config", &cfg, "--horizon", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon"));
}

#[test]
fn greedy_horizon_exhausted() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"greedy","j":6},"horizon":2000}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let plan: Value = serde_json::from_str(&fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["status"], "exhausted");
    assert_eq!(plan["block_lengths"], serde_json::json!([1, 3, 55, 987]));
}

#[test]
fn verify_golden_default_suite() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "v.json", r#"{"alpha":{"kind":"periodic","period":[1]}}"#);
    let out = tmp.path().join("out");
    let o = rotlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    let reports = v["reports"].as_array().unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r["lemma_id"].as_str().unwrap()).collect();
    assert_eq!(
        ids,
        [
            "denjoy_koksma",
            "refined_denjoy_koksma",
            "parity_lemma",
            "weak_null",
            "cohomology_witness",
            "growth",
            "decorrelation",
            "l4_window"
        ]
    );
    // the literal Fourier bound fails at k = 3, 5; every other hard check passes
    assert_eq!(v["hard_failures"], serde_json::json!(["weak_null"]));
    let weak = &reports[3]["parts"];
    assert_eq!(weak[0]["lemma_id"], "weak_null_literal_bound");
    assert_eq!(weak[0]["pass"], false);
    assert_eq!(weak[1]["pass"], true);
    assert_eq!(code(&o), 1);

    let lenient = write_config(
        tmp.path(),
        "k1.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"verify":{"weak_null_k":1}}"#,
    );
    let o = rotlab(&["verify", "--config", &lenient, "--out", tmp.path().join("k1").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn verify_rejects_nonzero_mean() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "m.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},
            "psi":{"breakpoints":[{"num":"0","den":"1"},{"num":"1","den":"3"}],
                   "values":[{"num":"1","den":"1"},{"num":"-1","den":"1"}]}}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mean 0"));
    assert!(!out.join("verify.json").exists());
}

#[test]
fn verify_custom_psi_skips_psi_star_checks() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"alpha":{"kind":"periodic","period":[2]},
            "psi":{"breakpoints":[{"num":"0","den":"1"},{"num":"1","den":"3"}],
                   "values":[{"num":"2","den":"1"},{"num":"-1","den":"1"}]},
            "verify":{"q_max":10000,"weak_null_k":1}}"#,
    );
    let out = tmp.path().join("out");
    let o = rotlab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    let skipped: Vec<&str> = v["skipped_checks"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(skipped.iter().any(|s| s.starts_with("refined_dk")));
    assert!(skipped.iter().any(|s| s.starts_with("growth")));
}

#[test]
fn report_summarizes_directory() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"r_sequence","n":5}}"#,
    );
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();
    assert_eq!(code(&rotlab(&["report", "--out", out_s])), 2);
    assert_eq!(code(&rotlab(&["experiment", "--config", &cfg, "--out", out_s])), 0);
    let o = rotlab(&["report", "--out", out_s]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("status=\"complete\" stages=5"), "{s}");
    assert!(s.contains("stages.csv rows=5"));
    assert!(s.lines().any(|l| l.starts_with("config_sha256 ")));
}

#[test]
fn out_dir_from_env() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"alpha":{"kind":"periodic","period":[1]},"plan":{"kind":"r_sequence","n":3}}"#,
    );
    let out = tmp.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_rotlab"))
        .args(["experiment", "--config", &cfg])
        .env("ROTLAB_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("stages.csv").exists());
}
