use std::process::{Command, Output};

use serde_json::Value;

fn lieexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieexp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lieexp_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieexp"))
        .env("LIEEXP_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn ratio(v: &Value) -> (u64, u64) {
    (v["num"].as_u64().unwrap(), v["den"].as_u64().unwrap())
}

#[test]
fn verify_orbits_full_suite_exits_zero() {
    let out = lieexp(&["verify-orbits", "--all", "--max-rank", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let reports = v["reports"].as_array().unwrap();
    // 4 classical families over 5..=30, D1 over 3..=30, A1odd/A1even over 3..=15
    assert_eq!(reports.len(), 4 * 26 + 28 + 13 + 13);
}

#[test]
fn verify_orbits_type_a_lists_orbit_equations() {
    let out = lieexp(&["verify-orbits", "--series", "A", "--max-rank", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let eqs = v["reports"][0]["equations"].as_array().unwrap();
    assert!(eqs.iter().any(|e| e["equation-id"].as_str().unwrap().starts_with("Al.orbit")));
}

#[test]
fn verify_orbits_rejects_unknown_series() {
    assert_eq!(lieexp(&["verify-orbits", "--series", "E"]).status.code(), Some(2));
    assert_eq!(
        lieexp(&["verify-orbits", "--all", "--max-rank", "31"]).status.code(),
        Some(2)
    );
}

#[test]
fn slgen_orders_match_formula() {
    for (l, q, order) in [("2", "2", 168), ("3", "2", 20160)] {
        let out = lieexp(&["slgen", "--l", l, "--q", q, "--check-order"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["order"], order);
        assert_eq!(v["order_matches"], true);
    }
}

#[test]
fn slgen_without_flag_reports_order_only() {
    let v = json(&lieexp(&["slgen", "--l", "2", "--q", "2"]));
    assert_eq!(v["order"], 168);
    assert!(v.get("expected_order").is_none());
    assert!(v.get("order_matches").is_none());
}

#[test]
fn slgen_cap_exits_three_with_partial_count() {
    let out = lieexp(&["slgen", "--l", "3", "--q", "2", "--max-order", "500"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["complete"], false);
    assert_eq!(v["order"], 500);
}

#[test]
fn field_given_as_literal() {
    let v = json(&lieexp(&["slgen", "--l", "1", "--q", "GF(2^2)", "--check-order"]));
    assert_eq!(v["order"], 60);
    assert_eq!(v["order_matches"], true);
}

#[test]
fn bad_field_order_is_config_error() {
    assert_eq!(lieexp(&["slgen", "--l", "2", "--q", "6"]).status.code(), Some(2));
    assert_eq!(lieexp(&["boundary", "--l", "0", "--q", "2"]).status.code(), Some(2));
    assert_eq!(lieexp(&["--threads", "0", "slgen", "--l", "1", "--q", "2"]).status.code(), Some(2));
}

#[test]
fn boundary_within_six_over_l() {
    for (l, want, bound) in [("3", (2, 3), (2, 1)), ("4", (1, 2), (3, 2))] {
        let out = lieexp(&["boundary", "--l", l, "--q", "2"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(ratio(&v["ratio"]), want);
        assert_eq!(ratio(&v["bound"]), bound);
        assert_eq!(v["within_bound"], true);
    }
}

#[test]
fn boundary_sweep_oracle_agrees() {
    let out = lieexp(&["boundary", "--l", "2", "--q", "2", "--sweep-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sweep_agrees"], true);
    assert_eq!(v["sweep_boundary"], v["boundary"]);
    assert!(v.get("runtime_ms").is_none());
}

#[test]
fn spectrum_dense_passes_cheeger() {
    let out = lieexp(&["spectrum", "--l", "2", "--q", "2", "--mode", "dense"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cheeger_ok"], true);
    assert_eq!(v["method"], "dense");
    assert!((v["lambda2"].as_f64().unwrap() - 2.8799608321090386).abs() < 1e-9);
}

#[test]
fn spectrum_iterative_agrees_with_dense() {
    let d = json(&lieexp(&["spectrum", "--l", "2", "--q", "2", "--mode", "dense"]));
    let i = json(&lieexp(&["spectrum", "--l", "2", "--q", "2", "--mode", "iter"]));
    assert_eq!(i["converged"], true);
    let gap = (d["lambda2"].as_f64().unwrap() - i["lambda2"].as_f64().unwrap()).abs();
    assert!(gap <= 1e-6 * 3.0, "{gap}");
}

#[test]
fn report_csv_ratios_non_increasing() {
    let out = lieexp(&["report", "--csv", "--l", "2,3,4", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,q,n,d,lambda2,gap,ratio_num,ratio_den"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let ratios: Vec<(u128, u128)> = rows
        .iter()
        .map(|r| (r[6].parse().unwrap(), r[7].parse().unwrap()))
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1].0 * w[0].1 <= w[0].0 * w[1].1, "{ratios:?}");
    }
    assert_eq!(rows[2][2], "9999360");
    assert_eq!(rows[2][4], "");
}

#[test]
fn export_is_byte_identical_across_runs_and_threads() {
    let args = ["export", "--l", "2", "--q", "2", "--format", "edgelist"];
    let a = lieexp_threads("1", &args);
    let b = lieexp_threads("2", &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("# cayley sl l=2 q=2 n=168 d=3\n"));
    assert_eq!(text.lines().count(), 1 + 168 * 3 / 2);
}

#[test]
fn reports_are_reproducible() {
    for args in [
        &["boundary", "--l", "3", "--q", "2"][..],
        &["spectrum", "--l", "2", "--q", "2", "--mode", "iter"][..],
        &["verify-orbits", "--series", "D1,A1even", "--max-rank", "8"][..],
    ] {
        let a = lieexp_threads("1", args);
        let b = lieexp_threads("3", args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let out = lieexp(&["boundary", "--l", "2", "--q", "3", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(ratio(&v["ratio"]), (2, 1));
}
