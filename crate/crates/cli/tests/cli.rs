use std::process::{Command, Output};

use bifrac::fock::{thermal_state, FockOperator};

fn bifrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Rows of a grid CSV as (alpha, beta, re, im) strings.
fn grid_rows(csv: &str) -> Vec<[String; 4]> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,beta,re,im"));
    lines
        .map(|l| {
            let f: Vec<String> = l.split(',').map(str::to_string).collect();
            [f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone()]
        })
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn kernel_at_half_pi() {
    let o = bifrac(&["kernel", "--theta", "1.5708", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.39894+0.00000i\n");
}

#[test]
fn kernel_at_zero_is_a_numerical_error() {
    let o = bifrac(&["kernel", "--theta", "0", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("SpecialAngle"), "{}", stderr(&o));
}

#[test]
fn kernel_composition_prints_matching_values() {
    let o = bifrac(&["kernel", "--compose", "0.3", "0.4", "--x", "0.5", "--z", "-0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let values: Vec<&str> = out.lines().map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(values.len(), 2);
    assert_eq!(values[0], values[1]);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["kernel"][..],
        &["kernel", "--theta", "abc"],
        &["grid", "--kind", "wigner", "--op", "fock:0", "--range", "-3:3"],
        &["grid", "--kind", "wigner", "--op", "squeezed:1"],
        &["grid", "--kind", "nope", "--op", "fock:0"],
        &["grid", "--kind", "bifrac-wigner", "--op", "fock:0"],
        &["grid", "--kind", "wigner", "--op", "fock:0", "--verify-oracle"],
        &["grid", "--kind", "wigner", "--op", "file:/nonexistent/op.json"],
        &["state-stats", "--alpha", "1", "--beta", "1"],
        &["verify", "--only", "no_such_check"],
    ] {
        let o = bifrac(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = bifrac(&[
        "state-stats",
        "--alpha",
        "2",
        "--beta",
        "2",
        "--sweep-theta-alpha",
        "0.05:1.5:0.05",
        "--with-check",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("theta_alpha,sigma_pp,mean_n,g2,norm_captured,rs_residual")
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(num).collect()).collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r[5].abs() < 1e-6));
    let crossing = rows.windows(2).find(|w| w[0][3] < 1.0 && w[1][3] >= 1.0).unwrap();
    assert!(crossing[0][0] >= 0.75 - 1e-9 && crossing[1][0] <= 0.85 + 1e-9, "{crossing:?}");
}

#[test]
fn vacuum_statistics() {
    let o = bifrac(&[
        "state-stats",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--theta-alpha",
        "1.5708",
        "--theta-beta",
        "1.5708",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc[0]["mean_n"].as_f64().unwrap().abs() < 1e-12);

    // with θβ = 0 the pair sits in the forbidden band
    let o = bifrac(&["state-stats", "--alpha", "0", "--beta", "0", "--theta-alpha", "1.5708"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("ForbiddenBand"));
}

#[test]
fn vacuum_wigner_peak() {
    let o = bifrac(&["grid", "--kind", "wigner", "--op", "fock:0", "--range", "-3:3:61"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = grid_rows(&stdout(&o));
    assert_eq!(rows.len(), 61 * 61);
    let best = rows
        .iter()
        .max_by(|a, b| num(&a[2]).partial_cmp(&num(&b[2])).unwrap())
        .unwrap();
    assert_eq!(num(&best[0]), 0.0);
    assert_eq!(num(&best[1]), 0.0);
    assert!((num(&best[2]) - 1.0).abs() < 1e-8);
}

#[test]
fn vacuum_husimi_at_one() {
    let o = bifrac(&["grid", "--kind", "q", "--op", "fock:0", "--angles", "1.5708", "1.5708"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = grid_rows(&stdout(&o));
    let at = rows
        .iter()
        .find(|r| (num(&r[0]) - 1.0).abs() < 1e-12 && num(&r[1]) == 0.0)
        .unwrap();
    assert!((num(&at[2]) - 0.3679).abs() < 1e-4);
}

#[test]
fn zero_angle_bifrac_wigner_relabels_weyl() {
    let common = ["--op", "coherent:0.5,0.2", "--range", "-2:2:21"];
    let weyl = bifrac(&[&["grid", "--kind", "weyl"][..], &common].concat());
    let bw = bifrac(&[&["grid", "--kind", "bifrac-wigner", "--theta-alpha", "0", "--theta-beta", "0"][..], &common].concat());
    assert_eq!(weyl.status.code(), Some(0));
    assert_eq!(bw.status.code(), Some(0));
    let (w, a) = (grid_rows(&stdout(&weyl)), grid_rows(&stdout(&bw)));
    let n = 21;
    // A(α_i, β_j) = W̃(β_j, −α_i), and −α_i is grid point n−1−i
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (&a[i * n + j], &w[j * n + (n - 1 - i)]);
            assert_eq!((&x[2], &x[3]), (&y[2], &y[3]), "({i},{j})");
        }
    }
}

#[test]
fn oracle_check_passes() {
    let o = bifrac(&[
        "grid",
        "--kind",
        "bifrac-wigner",
        "--angles",
        "0.6",
        "0.3",
        "--op",
        "fock:0",
        "--verify-oracle",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    let line = err.lines().find(|l| l.starts_with("oracle:")).unwrap();
    let dev: f64 = line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(dev < 2e-3, "{line}");
}

#[test]
fn untrusted_grid_needs_opt_in() {
    let args = ["grid", "--kind", "wigner", "--op", "coherent:7,7", "--fock-dim", "32", "--range", "-1:1:3"];
    let o = bifrac(&args);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("UntrustedTruncation"));

    let o = bifrac(&[&args[..], &["--allow-untrusted", "--format", "json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["trusted"], false);
}

#[test]
fn grid_json_from_operator_file() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("thermal.json");
    std::fs::write(&op, thermal_state(0.3, 48).unwrap().to_json()).unwrap();
    let back = FockOperator::from_json(&std::fs::read_to_string(&op).unwrap()).unwrap();
    assert_eq!(back.dim(), 48);

    let spec = format!("file:{}", op.display());
    let o = bifrac(&["grid", "--kind", "wigner", "--op", &spec, "--range", "-2:2:5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["axes", "kind", "angles", "fock_dim", "values"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
    assert_eq!(doc["kind"], "wigner");
    assert_eq!(doc["fock_dim"], 48);
    assert_eq!(doc["values"].as_array().unwrap().len(), 25);

    // the file route and the built-in thermal operator agree exactly
    let inline = bifrac(&["grid", "--kind", "wigner", "--op", "thermal:0.3", "--fock-dim", "48", "--range", "-2:2:5", "--format", "json"]);
    assert_eq!(stdout(&inline), stdout(&o));
}

#[test]
fn verify_subset_and_determinism() {
    let o = bifrac(&["verify", "--only", "unitarity", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["check_name"].as_str().unwrap().contains("unitarity"));
        for key in ["status", "measured", "tolerance"] {
            assert!(c.get(key).is_some());
        }
    }

    let args = ["verify", "--only", "bifrac.unitarity", "states.family", "--seed", "7"];
    let (a, b) = (bifrac(&args), bifrac(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_failure_exits_1() {
    let o = bifrac(&["verify", "--only", "phasespace.trace_identity", "--n", "32"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["checks"][0]["status"], "fail");
}

#[test]
fn thread_cap() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_bifrac"))
            .args(["grid", "--kind", "wigner", "--op", "fock:1", "--range", "-1:1:5"])
            .env("BIFRAC_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, auto) = (run("1"), run("0"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, auto.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}
