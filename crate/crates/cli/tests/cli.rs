use std::process::{Command, Output};

fn trieshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trieshape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = trieshape(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn exact_two_keys_row() {
    let text = stdout(&["exact", "--p", "0.5", "--nmax", "1024"]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(
        lines.next().unwrap(),
        "n,ES,EK,EN,VarS,VarK,VarN,CovSK,CovSN,RhoSK,RhoSN"
    );
    let row: Vec<&str> = lines.nth(2).unwrap().split(',').collect();
    assert_eq!(&row[..3], ["2", "2", "4"]);
    assert_eq!(text.lines().count(), 2 + 1025);
}

#[test]
fn invalid_probability_exits_2() {
    let out = trieshape(&["exact", "--p", "1.0", "--nmax", "16"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must be in (0,1)"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(trieshape(&["exact"]).status.code(), Some(2));
    assert_eq!(
        trieshape(&["exact", "--p", "0.5", "--nmax", "40000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        trieshape(&["asym", "--p", "0.3", "--ratio", "1/2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(trieshape(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    // a handful of ℓ-terms cannot reach the stopping tolerance
    let out = trieshape(&["asym", "--p", "0.5", "--lmax", "3"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn io_failure_exits_4() {
    let out = trieshape(&[
        "exact",
        "--p",
        "0.5",
        "--nmax",
        "8",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = trieshape(&["exact", "--config", "/nonexistent/config.txt"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exchange_symmetric_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, path) in [("0.3", &a), ("0.7", &b)] {
        let out = trieshape(&[
            "exact",
            "--p",
            p,
            "--nmax",
            "1024",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (
        std::fs::read_to_string(a).unwrap(),
        std::fs::read_to_string(b).unwrap(),
    );
    let (ha, ra) = a.split_once('\n').unwrap();
    let (hb, rb) = b.split_once('\n').unwrap();
    assert_eq!(ra, rb);
    assert_eq!(ha.replace("p=0.3", "p=0.7"), hb);
}

#[test]
fn asym_symmetric_ratio() {
    let v = json(&["asym", "--p", "0.5", "--kmax", "5"]);
    let ratio = v["g0_ratio"].as_f64().unwrap();
    assert!((ratio - 0.927_241_603_5).abs() < 1e-8, "{ratio}");
    let g20 = v["g2"]["coefficients"][5]["re"].as_f64().unwrap();
    assert!((g20 - 1.779_227_486_248_22).abs() < 1e-12);
    assert_eq!(v["config"]["kmax"], 5);
}

#[test]
fn asym_general_p() {
    let v = json(&["asym", "--p", "0.3"]);
    let (l, l2) = (
        v["params"]["lambda"].as_f64().unwrap(),
        v["params"]["lambda_alt"].as_f64().unwrap(),
    );
    assert!((l - l2).abs() < 1e-13 * l);
    assert_eq!(v["g1"]["available"], false);
    assert_eq!(v["g3"]["available"], false);
    assert_eq!(v["g2"]["available"], true);
    assert!(v["g0_ratio"].is_null());

    let v = json(&["asym", "--p", "0.3", "--irrational"]);
    assert_eq!(v["params"]["ratio"]["kind"], "irrational");
}

#[test]
fn emit_f_one_period() {
    let text = stdout(&["asym", "--p", "0.5", "--emit-F", "--points", "512"]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("emit-F=true"));
    assert_eq!(lines.next().unwrap(), "log2n,F");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, f) = l.split_once(',').unwrap();
            (x.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 512);
    assert!(rows.last().unwrap().0 - rows[0].0 < 1.0);
    let max = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    assert!(max - min <= 3e-5 && max - min > 1e-6, "{}", max - min);
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--p", "0.5", "--n", "2000", "--trials", "2000", "--seed", "7",
    ];
    let a = stdout(&args);
    let b = stdout(&[&args[..], &["--threads", "1"]].concat());
    let (va, vb): (serde_json::Value, serde_json::Value) = (
        serde_json::from_str(&a).unwrap(),
        serde_json::from_str(&b).unwrap(),
    );
    assert_eq!(va["summary"], vb["summary"]);
    let rho = va["summary"]["rho_sk"].as_f64().unwrap();
    assert!((0.9..0.95).contains(&rho), "{rho}");
}

#[test]
fn simulate_raw_dump() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    stdout(&[
        "simulate",
        "--p",
        "0.4",
        "--n",
        "50",
        "--trials",
        "300",
        "--raw-out",
        raw.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(raw).unwrap();
    assert_eq!(text.lines().nth(1), Some("trial,S,K,N"));
    assert_eq!(text.lines().count(), 302);
}

#[test]
fn whiten_reports_source() {
    let v = json(&[
        "whiten", "--p", "0.3", "--n", "1000", "--trials", "2000", "--source", "exact",
    ]);
    assert_eq!(v["report"]["source"], "exact");
    assert_eq!(v["config"]["source"], "exact");
    let v = json(&["whiten", "--p", "0.5", "--n", "500", "--trials", "500"]);
    assert_eq!(v["config"]["source"], "exact");
    let out = trieshape(&[
        "whiten",
        "--p",
        "0.3",
        "--n",
        "500",
        "--trials",
        "500",
        "--source",
        "asymptotic",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hist_shows_dependence_contrast() {
    let corr = |p: &str| {
        json(&[
            "hist", "--p", p, "--n", "3000", "--trials", "2000", "--format", "json",
        ])["histogram"]["correlation"]
            .as_f64()
            .unwrap()
    };
    assert!(corr("0.1") < corr("0.5") - 0.1);
    let text = stdout(&[
        "hist", "--p", "0.5", "--n", "300", "--trials", "500", "--bins", "10",
    ]);
    assert_eq!(text.lines().count(), 2 + 100);
}

#[test]
fn compare_is_byte_identical() {
    let args = [
        "compare", "--p", "0.5", "--nmin", "256", "--nmax", "1024", "--trials", "200", "--seed",
        "3",
    ];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let rows: Vec<&str> = a.lines().skip(3).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let cells: Vec<&str> = r.split(',').collect();
        let diff: f64 = cells[3].parse().unwrap();
        assert!(diff < 1e-2);
        assert!(!cells[12].is_empty());
    }
}

#[test]
fn compare_recovers_slope() {
    let v = json(&[
        "compare",
        "--p",
        "0.3",
        "--nmin",
        "1024",
        "--nmax",
        "16384",
        "--precision",
        "standard",
        "--format",
        "json",
    ]);
    let err = v["summary"]["slope_rel_err"].as_f64().unwrap();
    assert!(err.abs() < 0.05, "{err}");
    assert!(v["rows"][0]["F"].is_null());
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\np=0.2\nnmax=8\nformat=json\n").unwrap();
    let v = json(&["exact", "--config", cfg.to_str().unwrap(), "--p", "0.5"]);
    assert_eq!(v["config"]["p"], 0.5);
    assert_eq!(v["config"]["nmax"], 8);
    assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let r = trieshape(&["exact", "--p", "1.5", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
