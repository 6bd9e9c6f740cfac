//! Monte Carlo harness for error control and power of replicability claims.
//!
//! Each repetition draws `X1j ~ N(mu1j, 1)` for all `m` features and sets
//! `P1j = 1 - Phi(X1j)`; the follow-up set is the BH rejections at level
//! `c1(q) q`; follow-up p-values are drawn the same way for the selected
//! features only, with the effect size calibrated on the realized `R1`:
//!
//! ```text
//! mu1 = Phi^-1(1 - 0.05/m)  - Phi^-1(1 - pi1)
//! mu2 = Phi^-1(1 - 0.05/R1) - Phi^-1(1 - pi2)
//! ```
//!
//! Features are laid out as contiguous blocks `[00 | 01 | 10 | 11]` where the
//! first digit marks a non-null primary study and the second a non-null
//! follow-up. Only claims in the `11` block are true.
//!
//! Repetition `i` draws from ChaCha8 seeded with the scenario seed on stream
//! `i`, so results do not depend on how repetitions are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::baselines::max_p_bh;
use crate::error::{Error, Result};
use crate::fdr::{c1, step_up_set};
use crate::fwer::bonferroni_claims;
use crate::model::{AnalysisConfig, Dataset, FeatureRecord};
use crate::normal;
use crate::selection::bh_reject;

/// Level of the Bonferroni procedure whose power calibrates `mu1`, `mu2`.
pub const CALIBRATION_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationScenario {
    pub id: String,
    pub m: usize,
    pub f00: f64,
    pub f01: f64,
    pub f10: f64,
    pub f11: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub l00: f64,
    pub c2: f64,
    pub q: f64,
    pub reps: usize,
    pub seed: u64,
    /// Equicorrelated noise blocks in the primary study; 0 means independent.
    pub block_size: usize,
    pub rho: f64,
}

impl Default for SimulationScenario {
    fn default() -> Self {
        Self {
            id: "scenario".into(),
            m: 1000,
            f00: 0.9,
            f01: 0.025,
            f10: 0.025,
            f11: 0.05,
            pi1: 0.1,
            pi2: 0.8,
            l00: 0.8,
            c2: 0.5,
            q: 0.05,
            reps: 10_000,
            seed: 1,
            block_size: 0,
            rho: 0.0,
        }
    }
}

/// Feature counts per block, in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCounts {
    pub n00: usize,
    pub n01: usize,
    pub n10: usize,
    pub n11: usize,
}

impl BlockCounts {
    fn primary_nonnull(&self, j: usize) -> bool {
        j >= self.n00 + self.n01
    }

    fn follow_nonnull(&self, j: usize) -> bool {
        (self.n00..self.n00 + self.n01).contains(&j) || j >= self.n00 + self.n01 + self.n10
    }

    pub fn is_true_replication(&self, j: usize) -> bool {
        j >= self.n00 + self.n01 + self.n10
    }
}

impl SimulationScenario {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let scn: Self = toml::from_str(s).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        let fr = [self.f00, self.f01, self.f10, self.f11];
        if fr.iter().any(|&f| f.is_nan() || f < 0.0) {
            return bad("fractions must be non-negative".into());
        }
        let total: f64 = fr.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("fractions sum to {total}, not 1"));
        }
        for (name, v) in [
            ("pi1", self.pi1),
            ("pi2", self.pi2),
            ("q", self.q),
            ("c2", self.c2),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} must lie in (0, 1)"));
            }
        }
        if !(0.0..1.0).contains(&self.l00) {
            return bad(format!("l00 = {} must lie in [0, 1)", self.l00));
        }
        if self.reps == 0 {
            return bad("reps must be positive".into());
        }
        if self.block_size > 0 && !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho = {} must lie in [0, 1]", self.rho));
        }
        Ok(())
    }

    pub fn counts(&self) -> BlockCounts {
        let n = |f: f64| (f * self.m as f64).round() as usize;
        let (n01, n10, n11) = (n(self.f01), n(self.f10), n(self.f11));
        BlockCounts {
            n00: self.m.saturating_sub(n01 + n10 + n11),
            n01,
            n10,
            n11,
        }
    }

    pub fn mu1(&self) -> f64 {
        normal::isf(CALIBRATION_LEVEL / self.m as f64) - normal::isf(self.pi1)
    }

    pub fn mu2(&self, r1: usize) -> f64 {
        normal::isf(CALIBRATION_LEVEL / r1 as f64) - normal::isf(self.pi2)
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            m: self.m as u64,
            l00: self.l00,
            c2: self.c2,
            t: None,
        }
    }

    /// Level of the BH selection on primary p-values.
    pub fn selection_level(&self) -> f64 {
        c1(self.q, self.l00, self.c2) * self.q
    }
}

/// One repetition's data.
#[derive(Debug, Clone, PartialEq)]
pub struct RepDraw {
    pub p1: Vec<f64>,
    /// Feature indices selected for follow-up, ascending.
    pub selected: Vec<usize>,
    /// Follow-up p-values aligned with `selected`.
    pub p2: Vec<f64>,
}

impl RepDraw {
    pub fn dataset(&self) -> Dataset {
        let records = self
            .selected
            .iter()
            .zip(&self.p2)
            .map(|(&j, &p2)| {
                FeatureRecord::new(
                    j.to_string(),
                    self.p1[j].max(f64::MIN_POSITIVE),
                    p2.max(f64::MIN_POSITIVE),
                )
            })
            .collect();
        Dataset::from_trusted(records)
    }
}

fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn draw_noise(rng: &mut ChaCha8Rng, n: usize, block_size: usize, rho: f64, out: &mut Vec<f64>) {
    out.clear();
    if block_size == 0 {
        out.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        return;
    }
    let shared_w = rho.sqrt();
    let own_w = (1.0 - rho).sqrt();
    let mut shared = 0.0;
    for j in 0..n {
        if j % block_size == 0 {
            shared = rng.sample::<f64, _>(StandardNormal);
        }
        let own: f64 = rng.sample(StandardNormal);
        out.push(shared_w * shared + own_w * own);
    }
}

/// Draw repetition `rep` of `scenario`.
pub fn draw_rep(scenario: &SimulationScenario, rep: u64) -> RepDraw {
    let counts = scenario.counts();
    let mut rng = rep_rng(scenario.seed, rep);
    let mu1 = scenario.mu1();

    let mut noise = Vec::with_capacity(scenario.m);
    draw_noise(
        &mut rng,
        scenario.m,
        scenario.block_size,
        scenario.rho,
        &mut noise,
    );
    let p1: Vec<f64> = noise
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let mu = if counts.primary_nonnull(j) { mu1 } else { 0.0 };
            normal::sf(mu + z)
        })
        .collect();

    let selected = bh_reject(&p1, scenario.selection_level());
    let p2 = if selected.is_empty() {
        Vec::new()
    } else {
        let mu2 = scenario.mu2(selected.len());
        selected
            .iter()
            .map(|&j| {
                let z: f64 = rng.sample(StandardNormal);
                let mu = if counts.follow_nonnull(j) { mu2 } else { 0.0 };
                normal::sf(mu + z)
            })
            .collect()
    };
    RepDraw { p1, selected, p2 }
}

/// Rule turning a repetition's data into replicability claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimRule {
    /// FDR r-value at most `q`, evaluated through the equivalent step-up form.
    FdrRValue,
    /// Bonferroni FWER r-value at most `q`.
    Bonferroni,
    /// BH on maximum p-values at level `q / (1 - l00)`.
    MaxPBh,
}

impl ClaimRule {
    pub fn label(self) -> &'static str {
        match self {
            ClaimRule::FdrRValue => "rvalue",
            ClaimRule::Bonferroni => "bonferroni",
            ClaimRule::MaxPBh => "max-p-bh",
        }
    }

    /// Claimed feature indices (into the full `m` vector).
    pub fn claims(self, scenario: &SimulationScenario, draw: &RepDraw) -> Vec<usize> {
        if draw.selected.is_empty() {
            return Vec::new();
        }
        let ds = draw.dataset();
        let cfg = scenario.analysis_config();
        let positions = match self {
            ClaimRule::FdrRValue => step_up_set(&ds, &cfg, scenario.q).replicated,
            ClaimRule::Bonferroni => bonferroni_claims(&ds, &cfg, scenario.q),
            ClaimRule::MaxPBh => max_p_bh(&ds, &cfg, scenario.q),
        };
        positions.into_iter().map(|k| draw.selected[k]).collect()
    }
}

/// Claims and their truth for one repetition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RepOutcome {
    pub selected: usize,
    pub claims: usize,
    pub true_claims: usize,
}

impl RepOutcome {
    fn score(scenario: &SimulationScenario, draw: &RepDraw, claims: &[usize]) -> Self {
        let counts = scenario.counts();
        Self {
            selected: draw.selected.len(),
            claims: claims.len(),
            true_claims: claims
                .iter()
                .filter(|&&j| counts.is_true_replication(j))
                .count(),
        }
    }

    pub fn false_claims(&self) -> usize {
        self.claims - self.true_claims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepResult {
    pub draw: RepDraw,
    pub claims: Vec<usize>,
    /// `true` for claims in the `11` block, aligned with `claims`.
    pub truth: Vec<bool>,
    pub outcome: RepOutcome,
}

pub fn simulate_rep(scenario: &SimulationScenario, rep_index: u64) -> RepResult {
    simulate_rep_with(scenario, rep_index, ClaimRule::FdrRValue)
}

pub fn simulate_rep_with(
    scenario: &SimulationScenario,
    rep_index: u64,
    rule: ClaimRule,
) -> RepResult {
    let draw = draw_rep(scenario, rep_index);
    let claims = rule.claims(scenario, &draw);
    let counts = scenario.counts();
    let truth = claims
        .iter()
        .map(|&j| counts.is_true_replication(j))
        .collect();
    let outcome = RepOutcome::score(scenario, &draw, &claims);
    RepResult {
        draw,
        claims,
        truth,
        outcome,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationMetrics {
    pub reps: usize,
    pub fdr_hat: f64,
    pub se_fdr: f64,
    pub avg_power: f64,
    pub se_power: f64,
    pub power_at_least_one: f64,
    pub se_palo: f64,
    /// Fraction of repetitions with at least one false claim.
    pub fwer_hat: f64,
    pub se_fwer: f64,
    pub mean_selected: f64,
    pub mean_claims: f64,
}

/// Mean and standard error (sample SD / sqrt n) accumulated in input order.
fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

impl SimulationMetrics {
    pub fn from_outcomes(scenario: &SimulationScenario, outcomes: &[RepOutcome]) -> Self {
        let n11 = scenario.counts().n11;
        let it = || outcomes.iter();
        let (fdr_hat, se_fdr) =
            mean_se(it().map(|o| o.false_claims() as f64 / o.claims.max(1) as f64));
        let (avg_power, se_power) = if n11 == 0 {
            (0.0, 0.0)
        } else {
            mean_se(it().map(|o| o.true_claims as f64 / n11 as f64))
        };
        let (power_at_least_one, se_palo) =
            mean_se(it().map(|o| if o.true_claims > 0 { 1.0 } else { 0.0 }));
        let (fwer_hat, se_fwer) =
            mean_se(it().map(|o| if o.false_claims() > 0 { 1.0 } else { 0.0 }));
        let (mean_selected, _) = mean_se(it().map(|o| o.selected as f64));
        let (mean_claims, _) = mean_se(it().map(|o| o.claims as f64));
        Self {
            reps: outcomes.len(),
            fdr_hat,
            se_fdr,
            avg_power,
            se_power,
            power_at_least_one,
            se_palo,
            fwer_hat,
            se_fwer,
            mean_selected,
            mean_claims,
        }
    }
}

#[cfg(feature = "parallel")]
fn run_reps<T, F>(reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps as u64).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_reps<T, F>(reps: usize, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..reps as u64).map(f).collect()
}

pub fn estimate(scenario: &SimulationScenario) -> Result<SimulationMetrics> {
    estimate_with(scenario, ClaimRule::FdrRValue)
}

pub fn estimate_with(scenario: &SimulationScenario, rule: ClaimRule) -> Result<SimulationMetrics> {
    scenario.validate()?;
    let outcomes = run_reps(scenario.reps, |rep| {
        simulate_rep_with(scenario, rep, rule).outcome
    });
    Ok(SimulationMetrics::from_outcomes(scenario, &outcomes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: SimulationScenario,
    pub metrics: SimulationMetrics,
}

/// One metrics row per `c2` grid point, all other parameters fixed.
pub fn sweep_c2(scenario: &SimulationScenario, c2_grid: &[f64]) -> Result<Vec<SweepRow>> {
    c2_grid
        .iter()
        .map(|&c2| {
            let scn = SimulationScenario {
                c2,
                ..scenario.clone()
            };
            estimate(&scn).map(|metrics| SweepRow {
                scenario: scn,
                metrics,
            })
        })
        .collect()
}

/// The r-value procedure and BH on maximum p-values run on identical draws.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineComparison {
    pub rvalue: SimulationMetrics,
    pub max_p: SimulationMetrics,
    /// Mean and SE of the per-repetition difference in claim counts
    /// (r-value minus max-p).
    pub mean_claim_diff: f64,
    pub se_claim_diff: f64,
}

pub fn compare_baseline(scenario: &SimulationScenario) -> Result<BaselineComparison> {
    scenario.validate()?;
    let pairs = run_reps(scenario.reps, |rep| {
        let draw = draw_rep(scenario, rep);
        let a = ClaimRule::FdrRValue.claims(scenario, &draw);
        let b = ClaimRule::MaxPBh.claims(scenario, &draw);
        (
            RepOutcome::score(scenario, &draw, &a),
            RepOutcome::score(scenario, &draw, &b),
        )
    });
    let (left, right): (Vec<RepOutcome>, Vec<RepOutcome>) = pairs.iter().copied().unzip();
    let (mean_claim_diff, se_claim_diff) =
        mean_se(pairs.iter().map(|(a, b)| a.claims as f64 - b.claims as f64));
    Ok(BaselineComparison {
        rvalue: SimulationMetrics::from_outcomes(scenario, &left),
        max_p: SimulationMetrics::from_outcomes(scenario, &right),
        mean_claim_diff,
        se_claim_diff,
    })
}

pub const METRICS_CSV_HEADER: &str =
    "scenario_id,c2,l00,pi1,pi2,fdr_hat,se_fdr,avg_power,se_power,p_at_least_one,se_palo";

pub fn metrics_csv_line(
    scenario_id: &str,
    scenario: &SimulationScenario,
    m: &SimulationMetrics,
) -> String {
    format!(
        "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        scenario_id,
        scenario.c2,
        scenario.l00,
        scenario.pi1,
        scenario.pi2,
        m.fdr_hat,
        m.se_fdr,
        m.avg_power,
        m.se_power,
        m.power_at_least_one,
        m.se_palo
    )
}

/// Parse `start:stop:step` into an inclusive grid. Steps are counted, not
/// accumulated, so `0.05:0.95:0.05` has exactly 19 points.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("grid {text:?} is not start:stop:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            (v * 1e12).round() / 1e12
        })
        .collect())
}
