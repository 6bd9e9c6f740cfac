//! FDR r-values for replicability and the equivalent step-up procedure.
//!
//! For a level `x`, every followed-up feature gets the combined statistic
//!
//! ```text
//! e_j(x) = max(p1_j / c1(x), R1 p2_j / (m c2))
//! ```
//!
//! and `f_i(x)` is the BH-style adjustment of the `e` vector taken at
//! feature `i` (minimum of `e_j m / rank_j` over `e_j >= e_i`, maximum rank
//! for ties). The r-value is the point where `f_i(x) = x`. Because
//! `f_i(x) / x` is strictly decreasing, `{x : f_i(x) <= x}` is a half-line
//! and its left end is found by bisection.

use crate::dependence::{c1_tilde, m_star};
use crate::error::{Error, Result};
use crate::model::{AnalysisConfig, Dataset, Method, RValueEntry, RValueReport};
use crate::root::left_edge;

/// Bracket and iteration count for the fixed-point bisection.
pub const BISECT_LO: f64 = 1e-12;
pub const BISECT_HI: f64 = 1.0 - 1e-12;
pub const BISECT_ITERATIONS: usize = 80;

/// Which form of the e-value adjustment to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdrVariant {
    /// Independent primary-study p-values.
    Independent,
    /// Arbitrary dependence: `m` replaced by `m* = m H_m`.
    GeneralDependence,
    /// Arbitrary dependence with every selected `p1 <= t`: `c1` replaced by
    /// `c~1`.
    ThresholdDependence { t: f64 },
}

impl FdrVariant {
    pub fn method(self) -> Method {
        match self {
            FdrVariant::Independent => Method::FdrIndependent,
            FdrVariant::GeneralDependence => Method::FdrGeneralDep,
            FdrVariant::ThresholdDependence { .. } => Method::FdrThresholdDep,
        }
    }
}

/// `c1(x) = (1 - c2) / (1 - l00 (1 - c2 x))`.
pub fn c1(x: f64, l00: f64, c2: f64) -> f64 {
    (1.0 - c2) / (1.0 - l00 * (1.0 - c2 * x))
}

/// The e-values at one level `x`, with maximum ranks for ties.
#[derive(Debug, Clone, PartialEq)]
pub struct EValueVector {
    pub evaluated_at_x: f64,
    pub values: Vec<f64>,
    /// 1-based; tied values share the largest rank of their group.
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepUpResult {
    pub q: f64,
    pub r2_count: usize,
    /// Dataset positions of the replicated features, ascending.
    pub replicated: Vec<usize>,
    pub replicated_ids: Vec<String>,
}

/// The e-value adjustment bound to a dataset, configuration and variant.
#[derive(Debug, Clone)]
pub(crate) struct Adjuster<'a> {
    dataset: &'a Dataset,
    config: AnalysisConfig,
    variant: FdrVariant,
    /// `m` or `m*`.
    multiplicity: f64,
}

impl<'a> Adjuster<'a> {
    pub(crate) fn new(
        dataset: &'a Dataset,
        config: &AnalysisConfig,
        variant: FdrVariant,
    ) -> Result<Self> {
        config.check()?;
        if let FdrVariant::ThresholdDependence { t } = variant {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidConfig(format!("t = {t} must lie in (0, 1)")));
            }
            if let Some((index, rec)) = dataset.records().iter().enumerate().find(|(_, r)| r.p1 > t)
            {
                return Err(Error::SelectionThresholdViolated {
                    index,
                    id: rec.id.clone(),
                    p1: rec.p1,
                    t,
                });
            }
        }
        let multiplicity = match variant {
            FdrVariant::GeneralDependence => m_star(config.m),
            _ => config.m as f64,
        };
        Ok(Self {
            dataset,
            config: *config,
            variant,
            multiplicity,
        })
    }

    pub(crate) fn c1_at(&self, x: f64) -> Result<f64> {
        let AnalysisConfig { m, l00, c2, .. } = self.config;
        match self.variant {
            FdrVariant::ThresholdDependence { t } => c1_tilde(x, t, m, l00, c2),
            _ => Ok(c1(x, l00, c2)),
        }
    }

    fn raw_e_values(&self, x: f64) -> Result<Vec<f64>> {
        let c = self.c1_at(x)?;
        let follow_scale = self.dataset.r1() as f64 / (self.multiplicity * self.config.c2);
        Ok(self
            .dataset
            .records()
            .iter()
            .map(|r| (r.p1 / c).max(follow_scale * r.p2))
            .collect())
    }

    pub(crate) fn e_values(&self, x: f64) -> Result<EValueVector> {
        let values = self.raw_e_values(x)?;
        let order = sorted_order(&values);
        let mut ranks = vec![0; values.len()];
        for (start, end) in tie_groups(&values, &order) {
            for &j in &order[start..end] {
                ranks[j] = end;
            }
        }
        Ok(EValueVector {
            evaluated_at_x: x,
            values,
            ranks,
        })
    }

    /// `f_i(x)` for every feature at once.
    pub(crate) fn f_all(&self, x: f64) -> Result<Vec<f64>> {
        let e = self.raw_e_values(x)?;
        let n = e.len();
        let order = sorted_order(&e);
        let groups: Vec<(usize, usize)> = tie_groups(&e, &order).collect();

        let mut out = vec![0.0; n];
        let mut running = f64::INFINITY;
        for &(start, end) in groups.iter().rev() {
            let adjusted = e[order[start]] * self.multiplicity / end as f64;
            running = running.min(adjusted);
            for &j in &order[start..end] {
                out[j] = running;
            }
        }
        Ok(out)
    }

    /// `f_i(x)` for a single feature.
    pub(crate) fn f_one(&self, x: f64, i: usize) -> Result<f64> {
        let e = self.raw_e_values(x)?;
        let ei = e[i];
        let mut sorted = e;
        sorted.sort_unstable_by(f64::total_cmp);
        let mut best = f64::INFINITY;
        let n = sorted.len();
        let mut k = 0;
        while k < n {
            let mut end = k + 1;
            while end < n && sorted[end] == sorted[k] {
                end += 1;
            }
            if sorted[k] >= ei {
                best = best.min(sorted[k] * self.multiplicity / end as f64);
            }
            k = end;
        }
        Ok(best)
    }

    /// The r-value of feature `i`: left end of `{x : f_i(x) <= x}` in
    /// (0, 1), or 1 if the predicate fails at the top of the bracket.
    pub(crate) fn r_value(&self, i: usize) -> Result<f64> {
        if i >= self.dataset.r1() {
            return Err(Error::FeatureOutOfRange {
                index: i,
                len: self.dataset.r1(),
            });
        }
        if self.f_one(BISECT_HI, i)? > BISECT_HI {
            return Ok(1.0);
        }
        // c~1 is only right-continuous; collect evaluation errors through the
        // closure rather than unwinding out of the bisection.
        let mut failure = None;
        let r = left_edge(BISECT_LO, BISECT_HI, BISECT_ITERATIONS, |x| {
            match self.f_one(x, i) {
                Ok(f) => f <= x,
                Err(e) => {
                    failure.get_or_insert(e);
                    true
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    pub(crate) fn step_up(&self, q: f64) -> Result<StepUpResult> {
        let records = self.dataset.records();
        let r1 = records.len();
        let primary_unit = self.c1_at(q)? * q / self.multiplicity;
        let follow_unit = if r1 == 0 {
            0.0
        } else {
            self.config.c2 * q / r1 as f64
        };
        let passes = |j: usize, r: usize| {
            let r = r as f64;
            records[j].p1 <= r * primary_unit && records[j].p2 <= r * follow_unit
        };
        let r2 = (1..=r1)
            .rev()
            .find(|&r| (0..r1).filter(|&j| passes(j, r)).count() == r)
            .unwrap_or(0);
        let replicated: Vec<usize> = if r2 == 0 {
            Vec::new()
        } else {
            (0..r1).filter(|&j| passes(j, r2)).collect()
        };
        Ok(StepUpResult {
            q,
            r2_count: r2,
            replicated_ids: replicated.iter().map(|&j| records[j].id.clone()).collect(),
            replicated,
        })
    }
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Half-open `[start, end)` runs of equal values in sorted order.
fn tie_groups<'v>(
    values: &'v [f64],
    order: &'v [usize],
) -> impl Iterator<Item = (usize, usize)> + 'v {
    let n = order.len();
    let mut start = 0;
    std::iter::from_fn(move || {
        if start >= n {
            return None;
        }
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let group = (start, end);
        start = end;
        Some(group)
    })
}

#[cfg(feature = "parallel")]
fn collect_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

pub fn e_values(dataset: &Dataset, config: &AnalysisConfig, x: f64) -> EValueVector {
    Adjuster::new(dataset, config, FdrVariant::Independent)
        .and_then(|s| s.e_values(x))
        .expect("independent variant has no failure modes")
}

/// `f_i(x)` for the independent variant.
///
/// # Panics
///
/// If `i` is not a dataset position.
pub fn f_i(dataset: &Dataset, config: &AnalysisConfig, x: f64, i: usize) -> f64 {
    assert!(i < dataset.r1(), "feature {i} out of range");
    Adjuster::new(dataset, config, FdrVariant::Independent)
        .and_then(|s| s.f_one(x, i))
        .expect("independent variant has no failure modes")
}

pub fn f_with(
    dataset: &Dataset,
    config: &AnalysisConfig,
    variant: FdrVariant,
    x: f64,
    i: usize,
) -> Result<f64> {
    if i >= dataset.r1() {
        return Err(Error::FeatureOutOfRange {
            index: i,
            len: dataset.r1(),
        });
    }
    Adjuster::new(dataset, config, variant)?.f_one(x, i)
}

/// `f_i(x)` for all features at level `x`.
pub fn f_all_with(
    dataset: &Dataset,
    config: &AnalysisConfig,
    variant: FdrVariant,
    x: f64,
) -> Result<Vec<f64>> {
    Adjuster::new(dataset, config, variant)?.f_all(x)
}

/// FDR r-value of the feature at position `i`.
///
/// # Panics
///
/// If `i` is not a dataset position.
pub fn fdr_rvalue(dataset: &Dataset, config: &AnalysisConfig, i: usize) -> f64 {
    match rvalue_with(dataset, config, FdrVariant::Independent, i) {
        Ok(r) => r,
        Err(e) => panic!("{e}"),
    }
}

pub fn rvalue_with(
    dataset: &Dataset,
    config: &AnalysisConfig,
    variant: FdrVariant,
    i: usize,
) -> Result<f64> {
    Adjuster::new(dataset, config, variant)?.r_value(i)
}

pub fn fdr_rvalues_all(dataset: &Dataset, config: &AnalysisConfig) -> RValueReport {
    rvalues_with(dataset, config, FdrVariant::Independent)
        .expect("independent variant has no failure modes")
}

pub fn rvalues_with(
    dataset: &Dataset,
    config: &AnalysisConfig,
    variant: FdrVariant,
) -> Result<RValueReport> {
    let adjuster = Adjuster::new(dataset, config, variant)?;
    let values = collect_indexed(dataset.r1(), |i| adjuster.r_value(i));
    let entries = values
        .into_iter()
        .zip(dataset.records())
        .map(|(r, rec)| {
            r.map(|r_value| RValueEntry {
                id: rec.id.clone(),
                r_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut config = *config;
    if let FdrVariant::ThresholdDependence { t } = variant {
        config.t = Some(t);
    }
    Ok(RValueReport {
        method: variant.method(),
        config,
        entries,
    })
}

/// The step-up procedure equivalent to declaring `r <= q`.
pub fn step_up_set(dataset: &Dataset, config: &AnalysisConfig, q: f64) -> StepUpResult {
    step_up_with(dataset, config, FdrVariant::Independent, q)
        .expect("independent variant has no failure modes")
}

pub fn step_up_with(
    dataset: &Dataset,
    config: &AnalysisConfig,
    variant: FdrVariant,
    q: f64,
) -> Result<StepUpResult> {
    Adjuster::new(dataset, config, variant)?.step_up(q)
}
