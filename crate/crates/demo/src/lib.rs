//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON document,
//! either the result or `{"error": "..."}`, so the page needs no generated
//! type glue beyond strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use repval::simulation::{estimate, SimulationScenario};
use repval::table::InputTable;
use repval::{rvalues, AnalysisConfig, Dataset, FdrVariant, Method};

#[derive(Debug, Serialize, PartialEq)]
pub struct Row {
    pub id: String,
    pub p1: f64,
    pub p2: f64,
    pub r_value: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct RValues {
    pub method: String,
    pub r1: usize,
    pub rows: Vec<Row>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Curve {
    pub id: String,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub r_value: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SweepPoint {
    pub c2: f64,
    pub avg_power: f64,
    pub se_power: f64,
    pub p_at_least_one: f64,
    pub fdr_hat: f64,
}

fn parse(table: &str, config: &AnalysisConfig) -> Result<Dataset, String> {
    let table = InputTable::parse(table, None).map_err(|e| e.to_string())?;
    let records = table.records().map_err(|e| e.to_string())?;
    Dataset::validate(records, config).map_err(|e| match e.record_index() {
        Some(i) => format!("line {}: {e}", table.line_of(i)),
        None => e.to_string(),
    })
}

fn config(m: f64, l00: f64, c2: f64) -> Result<AnalysisConfig, String> {
    if !(m >= 1.0 && m.fract() == 0.0 && m < 9.0e15) {
        return Err(format!("m = {m} must be a positive whole number"));
    }
    AnalysisConfig::new(m as u64, l00, c2).map_err(|e| e.to_string())
}

/// r-values for every row of a pasted TSV/CSV table.
pub fn compute_rvalues(
    table: &str,
    m: f64,
    l00: f64,
    c2: f64,
    method: &str,
    t: f64,
) -> Result<RValues, String> {
    let method: Method = method.parse().map_err(|e: repval::Error| e.to_string())?;
    let mut cfg = config(m, l00, c2)?;
    if method == Method::FdrThresholdDep {
        cfg = cfg.with_threshold(t).map_err(|e| e.to_string())?;
    }
    let data = parse(table, &cfg)?;
    let report = rvalues(&data, &cfg, method).map_err(|e| e.to_string())?;
    let rows = data
        .records()
        .iter()
        .zip(&report.entries)
        .map(|(rec, e)| Row {
            id: rec.id.clone(),
            p1: rec.p1,
            p2: rec.p2,
            r_value: e.r_value,
        })
        .collect();
    Ok(RValues {
        method: method.to_string(),
        r1: data.r1(),
        rows,
    })
}

/// `f_i(x)` on an even grid over (0, 1) for one feature, with its r-value:
/// the first crossing of the curve below the diagonal.
pub fn compute_curve(
    table: &str,
    m: f64,
    l00: f64,
    c2: f64,
    feature: usize,
    points: usize,
) -> Result<Curve, String> {
    let cfg = config(m, l00, c2)?;
    let data = parse(table, &cfg)?;
    let rec = data
        .records()
        .get(feature)
        .ok_or_else(|| format!("feature {feature} out of range for {} rows", data.r1()))?;
    let points = points.clamp(2, 2000);
    let x: Vec<f64> = (1..=points)
        .map(|k| k as f64 / (points + 1) as f64)
        .collect();
    let f = x
        .iter()
        .map(|&xi| repval::fdr::f_with(&data, &cfg, FdrVariant::Independent, xi, feature))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    let r_value = repval::rvalue_with(&data, &cfg, FdrVariant::Independent, feature)
        .map_err(|e| e.to_string())?;
    Ok(Curve {
        id: rec.id.clone(),
        x,
        f,
        r_value,
    })
}

/// Average power against `c2` on the grid 0.05, 0.10, ..., 0.95.
pub fn compute_sweep(
    pi1: f64,
    pi2: f64,
    l00: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>, String> {
    (1..=19)
        .map(|k| {
            let scn = SimulationScenario {
                id: "demo".into(),
                pi1,
                pi2,
                l00,
                c2: k as f64 * 0.05,
                reps: reps.clamp(1, 5000),
                seed,
                ..Default::default()
            };
            let m = estimate(&scn).map_err(|e| e.to_string())?;
            Ok(SweepPoint {
                c2: scn.c2,
                avg_power: m.avg_power,
                se_power: m.se_power,
                p_at_least_one: m.power_at_least_one,
                fdr_hat: m.fdr_hat,
            })
        })
        .collect()
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    let v = match r {
        Ok(v) => serde_json::to_value(v),
        Err(e) => Ok(serde_json::json!({ "error": e })),
    };
    v.map(|v| v.to_string())
        .unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }).to_string())
}

#[wasm_bindgen]
pub fn rvalues_json(table: &str, m: f64, l00: f64, c2: f64, method: &str, t: f64) -> String {
    to_json(compute_rvalues(table, m, l00, c2, method, t))
}

#[wasm_bindgen]
pub fn fixed_point_curve_json(
    table: &str,
    m: f64,
    l00: f64,
    c2: f64,
    feature: usize,
    points: usize,
) -> String {
    to_json(compute_curve(table, m, l00, c2, feature, points))
}

#[wasm_bindgen]
pub fn power_sweep_json(pi1: f64, pi2: f64, l00: f64, reps: usize, seed: u64) -> String {
    to_json(compute_sweep(pi1, pi2, l00, reps, seed))
}
