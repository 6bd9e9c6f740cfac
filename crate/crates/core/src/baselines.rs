//! Comparator procedures: BH on the per-feature maximum p-value, and
//! two-study meta-analysis combiners.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::model::{AnalysisConfig, Dataset};
use crate::normal;
use crate::selection::bh_reject_padded;

/// BH on `max(p1, p2)` over all `m` features at level `q / (1 - l00)`,
/// with the maximum of every non-followed feature set to one. Returns
/// dataset positions, ascending.
pub fn max_p_bh(dataset: &Dataset, config: &AnalysisConfig, q: f64) -> Vec<usize> {
    let maxima: Vec<f64> = dataset.records().iter().map(|r| r.p1.max(r.p2)).collect();
    bh_reject_padded(&maxima, config.m, q / (1.0 - config.l00))
}

pub fn max_p_bh_ids(dataset: &Dataset, config: &AnalysisConfig, q: f64) -> Vec<String> {
    max_p_bh(dataset, config, q)
        .into_iter()
        .map(|j| dataset.records()[j].id.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    Fisher,
    Stouffer,
}

impl Combiner {
    pub fn column_name(self) -> &'static str {
        match self {
            Combiner::Fisher => "meta_p_fisher",
            Combiner::Stouffer => "meta_p_stouffer",
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combiner::Fisher => "fisher",
            Combiner::Stouffer => "stouffer",
        })
    }
}

impl FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fisher" => Ok(Combiner::Fisher),
            "stouffer" => Ok(Combiner::Stouffer),
            other => Err(Error::InvalidConfig(format!("unknown combiner {other:?}"))),
        }
    }
}

/// Combined p-value of one pair.
///
/// Fisher: `X = -2 (ln p1 + ln p2)` is chi-square with 4 degrees of freedom,
/// whose survival function is `exp(-X/2) (1 + X/2)`.
/// Stouffer: `(z1 + z2) / sqrt 2` with `z = Phi^-1(1 - p)`.
pub fn meta_p(p1: f64, p2: f64, combiner: Combiner) -> f64 {
    match combiner {
        Combiner::Fisher => {
            let half = -(p1.ln() + p2.ln());
            (p1 * p2 * (1.0 + half)).min(1.0)
        }
        Combiner::Stouffer => {
            let z = (normal::isf(p1) + normal::isf(p2)) * std::f64::consts::FRAC_1_SQRT_2;
            normal::sf(z)
        }
    }
}
