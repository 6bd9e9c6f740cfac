//! Bonferroni-based FWER r-values.
//!
//! `f_j(x) = max(m p1_j / c1(x), R1 p2_j / c2)`; the r-value is the fixed
//! point of `f_j` in `[0, 1)`, else 1. `f_j(x) / x` is strictly decreasing,
//! so the fixed point is the left end of `{x : f_j(x) <= x}`.

use crate::fdr::{c1, BISECT_ITERATIONS};
use crate::model::{AnalysisConfig, Dataset, Method, RValueEntry, RValueReport};
use crate::root::left_edge;

const UPPER: f64 = 1.0 - 1e-12;

pub fn bonferroni_f(p1: f64, p2: f64, r1: usize, config: &AnalysisConfig, x: f64) -> f64 {
    let AnalysisConfig { m, l00, c2, .. } = *config;
    (m as f64 * p1 / c1(x, l00, c2)).max(r1 as f64 * p2 / c2)
}

fn rvalue_of(p1: f64, p2: f64, r1: usize, config: &AnalysisConfig) -> f64 {
    if bonferroni_f(p1, p2, r1, config, UPPER) > UPPER {
        return 1.0;
    }
    left_edge(0.0, UPPER, BISECT_ITERATIONS, |x| {
        bonferroni_f(p1, p2, r1, config, x) <= x
    })
}

/// Bonferroni r-value of the feature at position `j`.
///
/// # Panics
///
/// If `j` is not a dataset position.
pub fn bonferroni_rvalue(dataset: &Dataset, config: &AnalysisConfig, j: usize) -> f64 {
    let rec = &dataset.records()[j];
    rvalue_of(rec.p1, rec.p2, dataset.r1(), config)
}

pub fn bonferroni_rvalues_all(dataset: &Dataset, config: &AnalysisConfig) -> RValueReport {
    let r1 = dataset.r1();
    RValueReport {
        method: Method::FwerBonferroni,
        config: *config,
        entries: dataset
            .records()
            .iter()
            .map(|rec| RValueEntry {
                id: rec.id.clone(),
                r_value: rvalue_of(rec.p1, rec.p2, r1, config),
            })
            .collect(),
    }
}

/// Features declared replicated at FWER level `alpha`, by the threshold form
/// `f_j(alpha) <= alpha`.
pub fn bonferroni_claims(dataset: &Dataset, config: &AnalysisConfig, alpha: f64) -> Vec<usize> {
    let r1 = dataset.r1();
    dataset
        .records()
        .iter()
        .enumerate()
        .filter(|(_, rec)| bonferroni_f(rec.p1, rec.p2, r1, config, alpha) <= alpha)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeatureRecord;

    /// Each branch of the max is affine in x after clearing c1, so each has a
    /// closed-form crossing; the r-value is the larger one.
    fn closed_form(p1: f64, p2: f64, r1: usize, cfg: &AnalysisConfig) -> f64 {
        let AnalysisConfig { m, l00, c2, .. } = *cfg;
        let mp = m as f64 * p1;
        let slope = mp * l00 * c2 / (1.0 - c2);
        let primary = if slope >= 1.0 {
            f64::INFINITY
        } else {
            mp * (1.0 - l00) / (1.0 - c2) / (1.0 - slope)
        };
        let follow = r1 as f64 * p2 / c2;
        let r = primary.max(follow);
        if r < 1.0 {
            r
        } else {
            1.0
        }
    }

    fn ds(m: u64, l00: f64, rows: &[(f64, f64)]) -> (Dataset, AnalysisConfig) {
        let cfg = AnalysisConfig::new(m, l00, 0.5).unwrap();
        let recs = rows
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| FeatureRecord::new(format!("f{i}"), a, b))
            .collect();
        (Dataset::validate(recs, &cfg).unwrap(), cfg)
    }

    #[test]
    fn single_feature_closed_form() {
        let (d, cfg) = ds(1, 0.0, &[(0.025, 0.025)]);
        assert!((bonferroni_rvalue(&d, &cfg, 0) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn all_ones_give_one() {
        let (d, cfg) = ds(10, 0.8, &[(1.0, 1.0), (1.0, 1.0)]);
        assert_eq!(bonferroni_rvalues_all(&d, &cfg).values(), vec![1.0, 1.0]);
    }

    #[test]
    fn matches_closed_form_grid() {
        let p1s = [1e-9, 1e-6, 3e-4, 0.01];
        let p2s = [1e-5, 2e-3, 0.04, 0.3];
        for l00 in [0.0, 0.5, 0.8, 0.95] {
            let rows: Vec<(f64, f64)> = p1s
                .iter()
                .flat_map(|&a| p2s.iter().map(move |&b| (a, b)))
                .collect();
            let (d, cfg) = ds(1000, l00, &rows);
            for (j, &(a, b)) in rows.iter().enumerate() {
                let got = bonferroni_rvalue(&d, &cfg, j);
                let want = closed_form(a, b, rows.len(), &cfg);
                assert!(
                    (got - want).abs() < 1e-12,
                    "l00={l00} ({a},{b}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn threshold_form_agrees_with_rvalue() {
        let rows = [(1e-6, 1e-3), (2e-5, 0.01), (1e-4, 1e-4), (0.5, 0.5)];
        let (d, cfg) = ds(500, 0.8, &rows);
        let rv = bonferroni_rvalues_all(&d, &cfg);
        for alpha in [0.001, 0.01, 0.05, 0.1, 0.2] {
            let by_r: Vec<usize> = (0..rows.len())
                .filter(|&j| rv.entries[j].r_value <= alpha)
                .collect();
            assert_eq!(by_r, bonferroni_claims(&d, &cfg, alpha));
        }
    }
}
