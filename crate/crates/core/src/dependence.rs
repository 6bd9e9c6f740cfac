//! Corrections for arbitrary dependence among primary-study p-values.
//!
//! Two variants keep FDR control without independence in the primary study:
//! inflating `m` to `m* = m * H_m`, or, when every selected feature has a
//! primary p-value below a fixed threshold `t`, shrinking `c1(x)` to
//!
//! ```text
//! c~1(x) = max { a : a * (1 + H_k) = c1(x),  k = ceil(t m / (a x) - 1) }
//! ```
//!
//! where `H_k` is the k-th harmonic number (`H_0 = 0`).

use crate::error::{Error, Result};
use crate::fdr::{c1, FdrVariant};
use crate::model::{AnalysisConfig, Dataset, RValueReport};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// The k-th harmonic number `1 + 1/2 + ... + 1/k`, `H_0 = 0`.
///
/// Small `k` is summed directly from the smallest term up; larger `k` uses
/// the asymptotic expansion, whose truncation error is below `1/(240 k^8)`.
pub fn harmonic(k: u64) -> f64 {
    if k <= 64 {
        return (1..=k).rev().map(|i| 1.0 / i as f64).sum();
    }
    harmonic_asymptotic(k as f64)
}

/// `m` together with its harmonic inflation `m* = m * H_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicInflation {
    pub m: u64,
    pub m_star: f64,
}

impl HarmonicInflation {
    pub fn new(m: u64) -> Self {
        Self {
            m,
            m_star: m_star(m),
        }
    }
}

pub fn m_star(m: u64) -> f64 {
    m as f64 * harmonic(m)
}

/// The fixed selection threshold assumed by the threshold-dependence variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdDepConfig {
    pub t: f64,
}

/// `c~1(x)`: the largest `a` with `a (1 + H_k) = c1(x)` where
/// `k = ceil(t m / (a x) - 1)`.
///
/// Each candidate regime `k` gives `a_k = c1 / (1 + H_k)`; it is consistent
/// when `k < y_k <= k + 1` with `y_k = t m (1 + H_k) / (c1 x)`. `y_k - k` rises
/// then falls in `k`, so the predicate `y_k <= k + 1` is false up to some
/// index and true afterwards, and its first true index is consistent. That
/// index is the smallest consistent `k`, i.e. the largest `a`.
pub fn c1_tilde(x: f64, t: f64, m: u64, l00: f64, c2: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0 && t > 0.0 && t < 1.0) || m == 0 {
        return Err(Error::NoConsistentRegime { x, t });
    }
    let c = c1(x, l00, c2);
    let scale = t * m as f64 / (c * x);
    // k runs over integers held in f64: for tiny x the regime index can
    // exceed the u64 range
    let settled = |k: f64| scale * (1.0 + harmonic_real(k)) <= k + 1.0;

    if settled(0.0) {
        return Ok(c);
    }
    let mut hi = 1.0;
    while !settled(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConsistentRegime { x, t });
        }
    }
    // settled(lo) is false, settled(hi) is true
    let mut lo = hi / 2.0;
    while hi - lo > 1.0 {
        let mid = (0.5 * (lo + hi)).floor();
        if mid <= lo || mid >= hi {
            break;
        }
        if settled(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(c / (1.0 + harmonic_real(hi)))
}

/// [`harmonic`] for an integer-valued `k` stored as `f64`.
fn harmonic_real(k: f64) -> f64 {
    if k <= 64.0 {
        harmonic(k as u64)
    } else {
        harmonic_asymptotic(k)
    }
}

fn harmonic_asymptotic(n: f64) -> f64 {
    let inv2 = 1.0 / (n * n);
    // ln n + gamma + 1/(2n) - 1/(12n^2) + 1/(120n^4) - 1/(252n^6)
    n.ln() + EULER_GAMMA + 0.5 / n - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// FDR r-value valid under arbitrary dependence in the primary study, with
/// `m` replaced by `m*` throughout the adjustment.
pub fn fdr_rvalue_general_dep(dataset: &Dataset, config: &AnalysisConfig, i: usize) -> f64 {
    crate::fdr::rvalue_with(dataset, config, FdrVariant::GeneralDependence, i)
        .expect("general-dependence variant has no failure modes")
}

pub fn fdr_rvalues_general_dep(dataset: &Dataset, config: &AnalysisConfig) -> RValueReport {
    crate::fdr::rvalues_with(dataset, config, FdrVariant::GeneralDependence)
        .expect("general-dependence variant has no failure modes")
}

/// FDR r-value under arbitrary dependence when selection used a fixed
/// threshold `t` on primary p-values; `c1` is replaced by `c~1`.
pub fn fdr_rvalue_threshold_dep(
    dataset: &Dataset,
    config: &AnalysisConfig,
    threshold: ThresholdDepConfig,
    i: usize,
) -> Result<f64> {
    crate::fdr::rvalue_with(
        dataset,
        config,
        FdrVariant::ThresholdDependence { t: threshold.t },
        i,
    )
}

pub fn fdr_rvalues_threshold_dep(
    dataset: &Dataset,
    config: &AnalysisConfig,
    threshold: ThresholdDepConfig,
) -> Result<RValueReport> {
    crate::fdr::rvalues_with(
        dataset,
        config,
        FdrVariant::ThresholdDependence { t: threshold.t },
    )
}
