//! Choosing the follow-up set: stable selection rules, the BH procedure and
//! the refinement that drops followed-up features whose primary p-values are
//! too large to ever be declared replicated at a given level.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fdr::c1;
use crate::model::{AnalysisConfig, Dataset};

/// A stable selection rule over the primary-study p-values.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionRule {
    /// All features with `p1 <= t`.
    Threshold(f64),
    /// BH rejections at level `alpha`.
    BhLevel(f64),
    /// The `k` smallest p-values; ties broken by input order.
    TopK(usize),
    /// A fixed, pre-specified id list (indices into the primary vector).
    Explicit(Vec<usize>),
}

/// Number of BH rejections: the largest `k` with `p_(k) <= k level / n`.
pub fn bh_count(pvalues: &[f64], level: f64) -> usize {
    let mut sorted: Vec<f64> = pvalues.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    bh_count_sorted(&sorted, sorted.len() as u64, level)
}

/// BH step-up over `sorted` followed by `total - sorted.len()` values equal
/// to one. Returns the number of rejections among `sorted`.
fn bh_count_sorted(sorted: &[f64], total: u64, level: f64) -> usize {
    let n = total as f64;
    if (sorted.len() as u64) < total && level >= 1.0 {
        // the padded ones pass at k = total, so everything is rejected
        return sorted.len();
    }
    sorted
        .iter()
        .enumerate()
        .rev()
        .find(|(k, &p)| p <= (k + 1) as f64 * level / n)
        .map_or(0, |(k, _)| k + 1)
}

/// Indices rejected by the BH step-up procedure, ascending.
pub fn bh_reject(pvalues: &[f64], level: f64) -> Vec<usize> {
    bh_reject_padded(pvalues, pvalues.len() as u64, level)
}

/// BH on `pvalues` plus `total - pvalues.len()` implicit p-values of one.
/// Only indices into `pvalues` are returned.
pub fn bh_reject_padded(pvalues: &[f64], total: u64, level: f64) -> Vec<usize> {
    debug_assert!(pvalues.len() as u64 <= total);
    let mut order: Vec<usize> = (0..pvalues.len()).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| pvalues[i]).collect();
    let k = bh_count_sorted(&sorted, total, level);
    let mut out: Vec<usize> = order[..k].to_vec();
    out.sort_unstable();
    out
}

/// BH p-value cutoff actually used: `k level / n` for the realized `k`, or
/// zero when nothing is rejected.
pub fn bh_cutoff(pvalues: &[f64], level: f64) -> f64 {
    let k = bh_count(pvalues, level);
    k as f64 * level / pvalues.len() as f64
}

pub fn apply_selection(primary: &[f64], rule: &SelectionRule) -> Vec<usize> {
    match rule {
        SelectionRule::Threshold(t) => (0..primary.len()).filter(|&i| primary[i] <= *t).collect(),
        SelectionRule::BhLevel(alpha) => bh_reject(primary, *alpha),
        SelectionRule::TopK(k) => {
            let mut order: Vec<usize> = (0..primary.len()).collect();
            // stable sort: equal p-values keep input order
            order.sort_by(|&a, &b| primary[a].total_cmp(&primary[b]));
            order.truncate(*k);
            order.sort_unstable();
            order
        }
        SelectionRule::Explicit(ids) => {
            let mut v: Vec<usize> = ids
                .iter()
                .copied()
                .filter(|&i| i < primary.len())
                .collect::<HashSet<_>>()
                .into_iter()
                .collect();
            v.sort_unstable();
            v
        }
    }
}

/// What is known about the primary p-values of features that were not
/// followed up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimaryContext<'a> {
    /// The `m - R1` primary p-values of the non-followed features.
    NonFollowed(&'a [f64]),
    /// Treat every non-followed p-value as one. This can only shrink the
    /// refined set relative to the true vector.
    PadWithOnes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub dataset: Dataset,
    /// Positions in the original dataset that were kept, ascending.
    pub kept: Vec<usize>,
    pub level: f64,
    pub padded: bool,
}

impl Refinement {
    pub const PADDING_CAVEAT: &'static str = "non-followed primary p-values were padded with 1; \
         the refined set can only be smaller than with the true values";
}

/// Keep only followed-up features the BH procedure at level `c1(q) q` over
/// all `m` primary p-values would reject.
pub fn refine_for_replicability(
    dataset: &Dataset,
    config: &AnalysisConfig,
    q: f64,
    primary: Option<PrimaryContext<'_>>,
) -> Result<Refinement> {
    config.check()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidConfig(format!("q = {q} must lie in (0, 1)")));
    }
    let primary = primary.ok_or(Error::MissingPrimaryVector)?;
    let level = c1(q, config.l00, config.c2) * q;
    let followed: Vec<f64> = dataset.records().iter().map(|r| r.p1).collect();
    let r1 = followed.len();

    let (kept, padded) = match primary {
        PrimaryContext::PadWithOnes => (bh_reject_padded(&followed, config.m, level), true),
        PrimaryContext::NonFollowed(rest) => {
            let expected = config.m - r1 as u64;
            if rest.len() as u64 != expected {
                return Err(Error::PrimaryVectorLength {
                    got: rest.len(),
                    expected,
                });
            }
            let mut all = followed.clone();
            all.extend_from_slice(rest);
            let kept = bh_reject(&all, level)
                .into_iter()
                .filter(|&i| i < r1)
                .collect();
            (kept, false)
        }
    };
    Ok(Refinement {
        dataset: dataset.subset(&kept),
        kept,
        level,
        padded,
    })
}
