//! Domain types shared by every procedure: the followed-up features, the
//! global analysis parameters and the per-feature r-value report.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One followed-up feature with its primary and follow-up study p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub p1: f64,
    pub p2: f64,
}

impl FeatureRecord {
    pub fn new(id: impl Into<String>, p1: f64, p2: f64) -> Self {
        Self {
            id: id.into(),
            p1,
            p2,
        }
    }
}

/// Global parameters of an analysis.
///
/// `m` is the number of features examined in the primary study, `l00` a
/// conservative lower bound on the fraction of features null in both studies
/// and `c2` the share of the error budget given to the follow-up study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub m: u64,
    pub l00: f64,
    pub c2: f64,
    /// Fixed selection threshold on primary p-values; only the
    /// threshold-dependence variant reads it.
    pub t: Option<f64>,
}

impl AnalysisConfig {
    pub const DEFAULT_L00: f64 = 0.8;
    pub const DEFAULT_C2: f64 = 0.5;

    pub fn new(m: u64, l00: f64, c2: f64) -> Result<Self> {
        let cfg = Self {
            m,
            l00,
            c2,
            t: None,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_threshold(mut self, t: f64) -> Result<Self> {
        self.t = Some(t);
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.l00) {
            return Err(Error::InvalidConfig(format!(
                "l00 = {} must lie in [0, 1)",
                self.l00
            )));
        }
        if !(self.c2 > 0.0 && self.c2 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "c2 = {} must lie in (0, 1)",
                self.c2
            )));
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidConfig(format!("t = {t} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidateOptions {
    /// Replace p-values equal to exactly zero with this value instead of
    /// rejecting them.
    pub clamp_zero: Option<f64>,
}

/// A validated set of followed-up features.
///
/// Construction checks that every p-value lies in (0, 1], ids are unique and
/// the follow-up set is no larger than `m`. `R1` is the record count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<FeatureRecord>,
}

impl Dataset {
    pub fn validate(records: Vec<FeatureRecord>, config: &AnalysisConfig) -> Result<Self> {
        Self::validate_with(records, config, ValidateOptions::default())
    }

    pub fn validate_with(
        mut records: Vec<FeatureRecord>,
        config: &AnalysisConfig,
        options: ValidateOptions,
    ) -> Result<Self> {
        config.check()?;
        if let Some(eps) = options.clamp_zero {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "clamp value {eps} must lie in (0, 1]"
                )));
            }
        }

        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(records.len());
        for (index, rec) in records.iter_mut().enumerate() {
            for (column, p) in [("p1", &mut rec.p1), ("p2", &mut rec.p2)] {
                if !p.is_finite() {
                    return Err(Error::NonFinitePValue {
                        index,
                        id: rec.id.clone(),
                        column,
                    });
                }
                if *p == 0.0 {
                    if let Some(eps) = options.clamp_zero {
                        *p = eps;
                    }
                }
                if *p <= 0.0 {
                    return Err(Error::NonPositivePValue {
                        index,
                        id: rec.id.clone(),
                        column,
                        value: *p,
                    });
                }
                if *p > 1.0 {
                    return Err(Error::PValueAboveOne {
                        index,
                        id: rec.id.clone(),
                        column,
                        value: *p,
                    });
                }
            }
        }
        for (index, rec) in records.iter().enumerate() {
            if let Some(&first) = seen.get(rec.id.as_str()) {
                return Err(Error::DuplicateId {
                    index,
                    first,
                    id: rec.id.clone(),
                });
            }
            seen.insert(rec.id.as_str(), index);
        }
        if records.len() as u64 > config.m {
            return Err(Error::R1ExceedsM {
                r1: records.len(),
                m: config.m,
            });
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[FeatureRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<FeatureRecord> {
        self.records
    }

    /// Number of followed-up features, `R1`.
    pub fn r1(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.id == id)
    }

    /// Wrap records that are valid by construction.
    pub(crate) fn from_trusted(records: Vec<FeatureRecord>) -> Self {
        Self { records }
    }

    pub(crate) fn subset(&self, keep: &[usize]) -> Self {
        Self {
            records: keep.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Steps 1-4 under independence within the primary study.
    FdrIndependent,
    /// `m` replaced by `m * H_m` (arbitrary dependence).
    FdrGeneralDep,
    /// `c1` replaced by `c~1` (arbitrary dependence, fixed selection threshold).
    FdrThresholdDep,
    FwerBonferroni,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::FdrIndependent => "fdr",
            Method::FdrGeneralDep => "fdr-general-dep",
            Method::FdrThresholdDep => "fdr-threshold-dep",
            Method::FwerBonferroni => "fwer-bonferroni",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fdr" | "fdr-independent" => Ok(Method::FdrIndependent),
            "fdr-general-dep" => Ok(Method::FdrGeneralDep),
            "fdr-threshold-dep" => Ok(Method::FdrThresholdDep),
            "fwer" | "fwer-bonferroni" => Ok(Method::FwerBonferroni),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RValueEntry {
    pub id: String,
    pub r_value: f64,
}

/// Per-feature r-values in dataset order, with the parameters that produced
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct RValueReport {
    pub method: Method,
    pub config: AnalysisConfig,
    pub entries: Vec<RValueEntry>,
}

impl RValueReport {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.r_value).collect()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.r_value)
    }

    /// Ids with r-value at most `level`.
    pub fn replicated_at(&self, level: f64) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.r_value <= level)
            .map(|e| e.id.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: u64) -> AnalysisConfig {
        AnalysisConfig::new(m, 0.8, 0.5).unwrap()
    }

    #[test]
    fn zero_p_value_is_rejected() {
        let recs = vec![FeatureRecord::new("a", 0.0, 0.5)];
        let err = Dataset::validate(recs, &cfg(10)).unwrap_err();
        assert!(matches!(err, Error::NonPositivePValue { column: "p1", .. }));
    }

    #[test]
    fn zero_p_value_clamped_on_request() {
        let recs = vec![FeatureRecord::new("a", 0.2, 0.0)];
        let opts = ValidateOptions {
            clamp_zero: Some(1e-300),
        };
        let ds = Dataset::validate_with(recs, &cfg(10), opts).unwrap();
        assert_eq!(ds.records()[0].p2, 1e-300);
    }

    #[test]
    fn p_above_one_and_nan() {
        let err = Dataset::validate(vec![FeatureRecord::new("a", 0.2, 1.5)], &cfg(3)).unwrap_err();
        assert!(matches!(err, Error::PValueAboveOne { .. }));
        let err =
            Dataset::validate(vec![FeatureRecord::new("a", f64::NAN, 0.5)], &cfg(3)).unwrap_err();
        assert!(matches!(err, Error::NonFinitePValue { .. }));
        // exactly one is allowed
        Dataset::validate(vec![FeatureRecord::new("a", 1.0, 1.0)], &cfg(3)).unwrap();
    }

    #[test]
    fn duplicate_ids() {
        let recs = vec![
            FeatureRecord::new("a", 0.1, 0.1),
            FeatureRecord::new("b", 0.1, 0.1),
            FeatureRecord::new("a", 0.2, 0.1),
        ];
        let err = Dataset::validate(recs, &cfg(10)).unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateId {
                index: 2,
                first: 0,
                id: "a".into()
            }
        );
    }

    #[test]
    fn more_rows_than_m() {
        let recs = (0..5)
            .map(|i| FeatureRecord::new(format!("f{i}"), 0.01, 0.01))
            .collect();
        let err = Dataset::validate(recs, &cfg(3)).unwrap_err();
        assert_eq!(err, Error::R1ExceedsM { r1: 5, m: 3 });
    }

    #[test]
    fn config_bounds() {
        assert!(AnalysisConfig::new(0, 0.0, 0.5).is_err());
        assert!(AnalysisConfig::new(5, 1.0, 0.5).is_err());
        assert!(AnalysisConfig::new(5, -0.1, 0.5).is_err());
        assert!(AnalysisConfig::new(5, 0.0, 0.0).is_err());
        assert!(AnalysisConfig::new(5, 0.0, 1.0).is_err());
        assert!(AnalysisConfig::new(5, 0.0, 0.5)
            .unwrap()
            .with_threshold(1.0)
            .is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let recs = vec![
            FeatureRecord::new("x", 3e-8, 2e-3),
            FeatureRecord::new("y", 1.0, 0.4),
        ];
        let once = Dataset::validate(recs, &cfg(100)).unwrap();
        let twice = Dataset::validate(once.clone().into_records(), &cfg(100)).unwrap();
        assert_eq!(once, twice);
        assert_eq!(twice.r1(), 2);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::FdrIndependent,
            Method::FdrGeneralDep,
            Method::FdrThresholdDep,
            Method::FwerBonferroni,
        ] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("holm".parse::<Method>().is_err());
    }
}
