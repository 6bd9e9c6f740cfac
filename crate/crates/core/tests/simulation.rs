//! Monte Carlo behaviour of the two-study normal-means model.

use repval::simulation::{
    compare_baseline, draw_rep, estimate, estimate_with, parse_grid, sweep_c2, ClaimRule,
    SimulationScenario,
};
use repval::{fdr_rvalues_all, Error};

fn scenario(reps: usize) -> SimulationScenario {
    SimulationScenario {
        id: "test".into(),
        reps,
        seed: 20240611,
        ..Default::default()
    }
}

#[test]
fn metrics_do_not_depend_on_thread_count() {
    let scn = scenario(300);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate(&scn).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn same_seed_same_draws_new_seed_new_draws() {
    let scn = scenario(1);
    assert_eq!(draw_rep(&scn, 3), draw_rep(&scn, 3));
    assert_ne!(draw_rep(&scn, 3).p1, draw_rep(&scn, 4).p1);
    let other = SimulationScenario {
        seed: 99,
        ..scn.clone()
    };
    assert_ne!(draw_rep(&scn, 3).p1, draw_rep(&other, 3).p1);
}

#[test]
fn fdr_controlled_in_default_scenario() {
    let m = estimate(&scenario(1500)).unwrap();
    assert!(m.fdr_hat <= 0.05 + 3.0 * m.se_fdr, "{m:?}");
    assert!(m.avg_power > 0.2 && m.avg_power < 0.6, "{m:?}");
    for v in [m.fdr_hat, m.avg_power, m.power_at_least_one, m.fwer_hat] {
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn pure_null_family_wise_error() {
    let scn = SimulationScenario {
        f00: 1.0,
        f01: 0.0,
        f10: 0.0,
        f11: 0.0,
        ..scenario(3000)
    };
    for rule in [ClaimRule::FdrRValue, ClaimRule::Bonferroni] {
        let m = estimate_with(&scn, rule).unwrap();
        assert!(m.fwer_hat <= 0.05 + 3.0 * m.se_fwer, "{rule:?}: {m:?}");
        assert_eq!(m.avg_power, 0.0);
    }
}

#[test]
fn bonferroni_controls_fwer_with_signal() {
    let m = estimate_with(&scenario(1500), ClaimRule::Bonferroni).unwrap();
    assert!(m.fwer_hat <= 0.05 + 3.0 * m.se_fwer, "{m:?}");
}

#[test]
fn step_up_claims_match_bisection_rvalues() {
    let scn = scenario(1);
    for rep in 0..40 {
        let draw = draw_rep(&scn, rep);
        let claims = ClaimRule::FdrRValue.claims(&scn, &draw);
        if draw.selected.is_empty() {
            assert!(claims.is_empty());
            continue;
        }
        let report = fdr_rvalues_all(&draw.dataset(), &scn.analysis_config());
        let by_r: Vec<usize> = report
            .entries
            .iter()
            .zip(&draw.selected)
            .filter(|(e, _)| e.r_value <= scn.q)
            .map(|(_, &j)| j)
            .collect();
        assert_eq!(by_r, claims, "rep {rep}");
    }
}

/// Sparse signal, as in genome-wide studies where almost every feature is
/// null in both studies.
fn sparse(l00: f64, reps: usize) -> SimulationScenario {
    SimulationScenario {
        f00: 0.99,
        f01: 0.0025,
        f10: 0.0025,
        f11: 0.005,
        l00,
        ..scenario(reps)
    }
}

#[test]
fn rvalue_procedure_claims_more_than_max_p_when_sparse() {
    for l00 in [0.0, 0.8, 0.9] {
        let cmp = compare_baseline(&sparse(l00, 1500)).unwrap();
        assert!(
            cmp.mean_claim_diff > 3.0 * cmp.se_claim_diff,
            "l00={l00}: {cmp:?}"
        );
        assert!(cmp.rvalue.fdr_hat <= 0.05 + 3.0 * cmp.rvalue.se_fdr);
        assert!(cmp.max_p.fdr_hat <= 0.05 + 3.0 * cmp.max_p.se_fdr);
    }
}

#[test]
fn baseline_direction_in_dense_scenario() {
    // with 10% non-null features the r-value procedure still wins at l00 = 0,
    // but BH on maxima at the inflated level q / (1 - l00) overtakes it
    let at = |l00| {
        compare_baseline(&SimulationScenario {
            l00,
            ..scenario(600)
        })
        .unwrap()
    };
    let plain = at(0.0);
    assert!(
        plain.mean_claim_diff > 3.0 * plain.se_claim_diff,
        "{plain:?}"
    );
    let inflated = at(0.8);
    assert!(inflated.mean_claim_diff < 0.0, "{inflated:?}");
    assert!(inflated.max_p.fdr_hat <= 0.05 + 3.0 * inflated.max_p.se_fdr);
}

#[test]
fn both_procedures_claim_more_as_l00_grows() {
    let a = compare_baseline(&sparse(0.0, 1500)).unwrap();
    let b = compare_baseline(&sparse(0.9, 1500)).unwrap();
    assert!(b.rvalue.mean_claims > a.rvalue.mean_claims);
    assert!(b.max_p.mean_claims > a.max_p.mean_claims);
}

#[test]
fn power_grows_with_l00() {
    let mut prev: Option<(f64, f64)> = None;
    for l00 in [0.0, 0.5, 0.8, 0.9] {
        let m = estimate(&SimulationScenario {
            l00,
            ..scenario(800)
        })
        .unwrap();
        if let Some((p, se)) = prev {
            assert!(m.avg_power >= p - 3.0 * (se + m.se_power), "l00={l00}");
        }
        prev = Some((m.avg_power, m.se_power));
    }
}

#[test]
fn sweep_rows_follow_grid() {
    let grid = parse_grid("0.05:0.95:0.05").unwrap();
    assert_eq!(grid.len(), 19);
    let rows = sweep_c2(&scenario(20), &grid[..3]).unwrap();
    let c2s: Vec<f64> = rows.iter().map(|r| r.scenario.c2).collect();
    assert_eq!(c2s, vec![0.05, 0.1, 0.15]);
}

#[test]
fn equicorrelated_blocks_smoke() {
    let scn = SimulationScenario {
        block_size: 20,
        rho: 0.5,
        ..scenario(800)
    };
    let m = estimate(&scn).unwrap();
    assert!(m.fdr_hat <= 0.05 + 3.0 * m.se_fdr, "{m:?}");
}

#[test]
fn scenario_files() {
    let scn = SimulationScenario::from_toml_str(
        "id = \"s4\"\npi1 = 0.1\npi2 = 0.5\nl00 = 0.9\nreps = 50\nseed = 3\n",
    )
    .unwrap();
    assert_eq!((scn.pi2, scn.l00, scn.m), (0.5, 0.9, 1000));
    assert!(matches!(
        SimulationScenario::from_toml_str("pi3 = 0.1"),
        Err(Error::InvalidScenario(_))
    ));
    assert!(matches!(
        SimulationScenario::from_toml_str("f00 = 0.5"),
        Err(Error::InvalidScenario(_))
    ));
}
