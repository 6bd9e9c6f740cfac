#![allow(dead_code)]

use std::path::PathBuf;

use repval::table::InputTable;
use repval::{AnalysisConfig, Dataset};

pub const IGA_M: u64 = 444_882;
pub const T2D_M: u64 = 68;
pub const TPP_M: u64 = 486_782;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn table(name: &str) -> InputTable {
    let text = std::fs::read_to_string(data_path(name)).expect("bundled data file");
    InputTable::parse(&text, None).expect("bundled data parses")
}

pub fn load(name: &str, config: &AnalysisConfig) -> Dataset {
    Dataset::validate(table(name).records().unwrap(), config).unwrap()
}

pub fn column(name: &str, header: &str) -> Vec<f64> {
    let t = table(name);
    let col = t.headers.iter().position(|h| h == header).expect("column");
    t.rows.iter().map(|r| r[col].parse().unwrap()).collect()
}

/// Round to `dp` decimals the way a printed table would.
pub fn round_dp(x: f64, dp: i32) -> f64 {
    let s = 10f64.powi(dp);
    (x * s).round() / s
}

pub fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mag = x.abs().log10().floor() as i32;
    round_dp(x, sig - 1 - mag)
}
