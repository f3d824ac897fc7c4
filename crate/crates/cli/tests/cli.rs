use std::path::PathBuf;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coma")).args(args).env_remove("COMA_SEED").output().expect("runs")
}

fn ok(args: &[&str]) -> String {
    let out = coma(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fail(args: &[&str]) -> (i32, String) {
    let out = coma(args);
    assert!(!out.status.success(), "{args:?} should fail");
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Rows of a CSV report as (header, values).
fn table(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {}", row[key]))
}

#[test]
fn combine_examples() {
    let one = scratch("one.csv", "0.04\n");
    let two = scratch("two.csv", "0.02\n0.06\n");
    let one = one.to_str().unwrap();
    let two = two.to_str().unwrap();
    let row = &table(&ok(&["combine", "--input", one]))[0];
    assert_eq!(row["decision"], "reject");
    let row = &table(&ok(&["combine", "--input", two, "--r", "1", "--alpha", "0.1"]))[0];
    assert_eq!((row["mean"].as_str(), row["critical_value"].as_str()), ("0.04", "0.05"));
    assert_eq!(row["decision"], "reject");
    let row = &table(&ok(&["combine", "--input", two, "--r", "1", "--alpha", "0.07"]))[0];
    assert_eq!(row["critical_value"], "0.035");
    assert_eq!(row["decision"], "accept");
}

#[test]
fn coma_of_everything_is_one() {
    let f = scratch("five.csv", "p\n0.01\n0.3\n0.02\n0.8\n0.004\n");
    for r in ["-inf", "-2", "-1", "0", "1", "inf"] {
        let row = &table(&ok(&["coma", "--input", f.to_str().unwrap(), "--r", r, "--set", "all"]))[0];
        assert_eq!(row["coma"], "1", "r = {r}");
    }
}

fn holm(p: &[f64], alpha: f64) -> Vec<bool> {
    let m = p.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut out = vec![false; m];
    for (j, &i) in idx.iter().enumerate() {
        if p[i] > alpha / (m - j) as f64 {
            break;
        }
        out[i] = true;
    }
    out
}

#[test]
fn bonferroni_bound_counts_holm_rejections() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for case in 0..20 {
        let m = rng.random_range(3..30);
        let p: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.4) { rng.random::<f64>() * 0.01 } else { rng.random() }).collect();
        let text: String = p.iter().map(|x| format!("{x:e}\n")).collect();
        let f = scratch(&format!("holm{case}.csv"), &text);
        let rejected = holm(&p, 0.05);
        let members: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
        if members.is_empty() {
            continue;
        }
        let set: Vec<String> = members.iter().map(|i| (i + 1).to_string()).collect();
        let row = &table(&ok(&["bound", "--input", f.to_str().unwrap(), "--r", "-inf", "--set", &set.join(",")]))[0];
        let holm_in = members.iter().filter(|&&i| rejected[i]).count();
        assert_eq!(num(row, "false_bound") as usize, members.len() - holm_in, "case {case}");
        assert_eq!(num(row, "true_discoveries") as usize, holm_in);
    }
}

#[test]
fn gamma_zero_matches_fwer_selection() {
    let f = scratch("sel.csv", "id,p\na,0.0001\nb,0.2\nc,0.003\nd,0.5\ne,0.0004\nf,0.04\ng,0.9\nh,0.01\n");
    let f = f.to_str().unwrap();
    for r in ["-1", "0", "1", "-inf"] {
        let fwer = ok(&["select", "--input", f, "--r", r, "--alpha", "0.1", "--fwer"]);
        let gamma = ok(&["select", "--input", f, "--r", r, "--alpha", "0.1", "--gamma", "0"]);
        assert_eq!(fwer, gamma, "r = {r}");
        assert!(fwer.contains("FWER <= 0.1"));
    }
    let out = ok(&["select", "--input", f, "--r", "-inf", "--gamma", "0.5"]);
    assert!(out.contains("FDP <= 0.5 with prob >= 0.95"), "{out}");
}

#[test]
fn adjusted_p_values_follow_holm() {
    let f = scratch("adj.csv", "id,p\na,0.001\nb,0.011\nc,0.02\nd,0.5\ne,0.013\n");
    let rows = table(&ok(&["adjust", "--input", f.to_str().unwrap(), "--r", "-inf"]));
    let got: Vec<&str> = rows.iter().map(|r| r["p_closed"].as_str()).collect();
    assert_eq!(got, ["0.005", "0.044", "0.044", "0.5", "0.044"]);
}

#[test]
fn fwer_experiment_under_the_null() {
    let trials = 2000.0;
    let out = ok(&["simulate", "--experiment", "fwer-exp", "--m", "50", "--trials", "2000", "--pi", "0", "--r", "-1,1", "--rho", "0,0.5"]);
    let se = (0.05f64 * 0.95 / trials).sqrt();
    for row in table(&out) {
        assert!(num(&row, "fwer") <= 0.05 + 3.0 * se, "{row:?}");
        assert_eq!(row["power"], "");
    }
}

#[test]
fn bonferroni_coma_curve_is_m_over_size() {
    let out = ok(&[
        "simulate", "--experiment", "coma-curve", "--m", "40", "--trials", "50", "--r=-inf", "--pi-in", "1", "--pi", "0",
        "--mu", "10", "--sizes", "1,4,10,40",
    ]);
    for row in table(&out) {
        let k = num(&row, "size");
        let c = num(&row, "coma_mean");
        assert!((c - 40.0 / k).abs() <= 1e-9 * c, "{row:?}");
    }
}

#[test]
fn comonotone_type1_is_the_level() {
    let out = ok(&["simulate", "--experiment", "type1-curve", "--m", "20", "--trials", "10000", "--r", "1", "--rho", "1", "--backend", "gauss"]);
    let row = &table(&out)[0];
    let se = (0.05f64 * 0.95 / 10_000.0).sqrt();
    assert!((num(row, "type1") - 0.05).abs() <= 3.0 * se, "{row:?}");
    assert_eq!(row["threshold"], "0.05");
}

#[test]
fn runs_are_reproducible() {
    let args = ["simulate", "--experiment", "fdp-exp", "--m", "30", "--trials", "200", "--mu", "3", "--format", "json"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let with_seed: Vec<&str> = args.iter().copied().chain(["--seed", "9"]).collect();
    assert_ne!(a, ok(&with_seed));
    let env = Command::new(env!("CARGO_BIN_EXE_coma")).args(args).env("COMA_SEED", "9").output().unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), ok(&with_seed));
    let json: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(json["experiment"], "fdp-exp");
    assert!(json["rows"][0]["power"].as_f64().unwrap() > 0.0);
}

#[test]
fn calibration_tables() {
    let dir = std::env::temp_dir().join(format!("coma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table1.json");
    let p = path.to_str().unwrap();
    let out = coma(&["calibrate", "--r", "-1", "--max-m", "1", "--trials", "4000", "--seed", "3", "--output", p]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let table: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let c1 = table["grid"][0][1].as_f64().unwrap();
    assert!((c1 - 0.05).abs() < 4.0 * (0.05f64 * 0.95 / 4000.0).sqrt(), "c(1) = {c1}");

    let a = dir.join("table5a.json");
    let b = dir.join("table5b.json");
    for t in [&a, &b] {
        ok(&["calibrate", "--r", "-1", "--max-m", "5", "--trials", "500", "--seed", "4", "--output", t.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let table: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let stored = table["grid"].as_array().unwrap().iter().find(|e| e[0] == 5).unwrap()[1].as_f64().unwrap();
    let f = scratch("emp.csv", "0.01\n0.2\n0.03\n0.5\n0.04\n");
    let row = &table_row(&ok(&["combine", "--input", f.to_str().unwrap(), "--backend", "empirical", "--table", a.to_str().unwrap()]));
    assert_eq!(num(row, "critical_value"), num_g(stored));
    assert_eq!(row["p_local"], "");

    let (code, err) = fail(&["adjust", "--input", f.to_str().unwrap(), "--backend", "empirical", "--table", a.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("no inverse") && err.lines().count() == 1, "{err}");
    let (_, err) = fail(&["combine", "--input", f.to_str().unwrap(), "--r", "1", "--backend", "empirical", "--table", a.to_str().unwrap()]);
    assert!(err.contains("r = -1"), "{err}");
}

fn table_row(csv: &str) -> std::collections::HashMap<String, String> {
    table(csv).remove(0)
}

/// The value after rounding to 12 significant digits.
fn num_g(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap()
}

#[test]
fn errors_are_single_lines() {
    let bad = scratch("bad.csv", "p\n0.1\nzero\n");
    let (code, err) = fail(&["combine", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3") && err.lines().count() == 1, "{err}");
    let f = scratch("ok.csv", "0.1\n0.2\n");
    let (code, err) = fail(&["bound", "--input", f.to_str().unwrap(), "--set", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown id '3'"), "{err}");
    let (code, err) = fail(&["bound", "--input", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("--set") && err.lines().count() == 1, "{err}");
    let (code, _) = fail(&["select", "--input", f.to_str().unwrap(), "--fwer", "--gamma", "0.1"]);
    assert_eq!(code, 2);
    let (_, err) = fail(&["combine", "--input", "/nonexistent/p.csv"]);
    assert!(err.starts_with("error: /nonexistent/p.csv"), "{err}");
}
