use repval_demo::{fixed_point_curve_json, power_sweep_json, rvalues_json};
use serde_json::Value;

const T2D: &str = include_str!("../../../data/t2d.tsv");

fn json(s: String) -> Value {
    serde_json::from_str(&s).expect("valid JSON")
}

#[test]
fn rvalues_for_pasted_table() {
    let v = json(rvalues_json(T2D, 68.0, 0.0, 0.5, "fdr", 0.0));
    assert_eq!(v["r1"], 11);
    let r: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["r_value"].as_f64().unwrap())
        .collect();
    assert!((r[0] - 0.0055).abs() < 5e-5);
    assert_eq!(r[10], 1.0);
    assert_eq!(v["rows"][0]["id"], "chr7:27953796");
}

#[test]
fn rvalues_csv_and_methods() {
    let csv = "id,p1,p2\na,0.025,0.025\n";
    let v = json(rvalues_json(csv, 1.0, 0.0, 0.5, "fwer-bonferroni", 0.0));
    assert!((v["rows"][0]["r_value"].as_f64().unwrap() - 0.05).abs() < 1e-9);
    let v = json(rvalues_json(csv, 1.0, 0.0, 0.5, "fdr-threshold-dep", 0.03));
    assert!(v["rows"][0]["r_value"].as_f64().unwrap() >= 0.05 - 1e-9);
}

#[test]
fn errors_come_back_as_json() {
    let v = json(rvalues_json(
        "id\tp1\tp2\na\t0\t0.1\n",
        10.0,
        0.0,
        0.5,
        "fdr",
        0.0,
    ));
    assert!(v["error"].as_str().unwrap().contains("line 2"));
    let v = json(rvalues_json(T2D, 5.0, 0.0, 0.5, "fdr", 0.0));
    assert!(v["error"].is_string());
    let v = json(rvalues_json(T2D, 68.5, 0.0, 0.5, "fdr", 0.0));
    assert!(v["error"].is_string());
    let v = json(rvalues_json(T2D, 68.0, 0.0, 0.5, "holm", 0.0));
    assert!(v["error"].is_string());
    let v = json(fixed_point_curve_json(T2D, 68.0, 0.0, 0.5, 40, 10));
    assert!(v["error"].is_string());
}

#[test]
fn curve_crosses_diagonal_at_rvalue() {
    let v = json(fixed_point_curve_json(T2D, 68.0, 0.8, 0.5, 3, 99));
    let x: Vec<f64> = v["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    let f: Vec<f64> = v["f"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    let r = v["r_value"].as_f64().unwrap();
    assert_eq!(x.len(), 99);
    for (xi, fi) in x.iter().zip(&f) {
        assert_eq!(*fi <= *xi, *xi >= r, "x={xi} f={fi} r={r}");
    }
}

#[test]
fn sweep_has_nineteen_points() {
    let v = json(power_sweep_json(0.1, 0.8, 0.8, 20, 3));
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 19);
    assert!((pts[0]["c2"].as_f64().unwrap() - 0.05).abs() < 1e-12);
    assert!(pts
        .iter()
        .all(|p| (0.0..=1.0).contains(&p["avg_power"].as_f64().unwrap())));
    assert_eq!(
        power_sweep_json(0.1, 0.8, 0.8, 20, 3),
        power_sweep_json(0.1, 0.8, 0.8, 20, 3)
    );
}
