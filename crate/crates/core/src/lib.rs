//! Replicability analysis for two-stage studies.
//!
//! A primary study screens `m` features; the `R1` most promising ones are
//! followed up in an independent study. For every followed-up feature this
//! crate computes its r-value: the lowest FDR (or FWER) level at which the
//! feature can be declared replicated, i.e. non-null in both studies.
//!
//! ```
//! use repval::{fdr_rvalues_all, AnalysisConfig, Dataset, FeatureRecord};
//!
//! let config = AnalysisConfig::new(68, 0.0, 0.5).unwrap();
//! let data = Dataset::validate(
//!     vec![
//!         FeatureRecord::new("rs1", 8.07e-05, 1.34e-07),
//!         FeatureRecord::new("rs2", 5.40e-05, 1.49e-04),
//!     ],
//!     &config,
//! )
//! .unwrap();
//! let report = fdr_rvalues_all(&data, &config);
//! assert!(report.entries.iter().all(|e| e.r_value < 0.05));
//! ```

pub mod baselines;
pub mod dependence;
pub mod error;
pub mod fdr;
pub mod fwer;
pub mod model;
pub mod normal;
mod root;
pub mod selection;
pub mod simulation;
pub mod table;

pub use baselines::{max_p_bh, meta_p, Combiner};
pub use dependence::{
    c1_tilde, fdr_rvalue_general_dep, fdr_rvalue_threshold_dep, harmonic, m_star,
    HarmonicInflation, ThresholdDepConfig,
};
pub use error::{Error, Result};
pub use fdr::{
    c1, e_values, f_i, fdr_rvalue, fdr_rvalues_all, rvalue_with, rvalues_with, step_up_set,
    step_up_with, EValueVector, FdrVariant, StepUpResult,
};
pub use fwer::{bonferroni_rvalue, bonferroni_rvalues_all};
pub use model::{
    AnalysisConfig, Dataset, FeatureRecord, Method, RValueEntry, RValueReport, ValidateOptions,
};
pub use selection::{
    apply_selection, bh_reject, refine_for_replicability, PrimaryContext, SelectionRule,
};

/// r-values for any method.
pub fn rvalues(dataset: &Dataset, config: &AnalysisConfig, method: Method) -> Result<RValueReport> {
    match method {
        Method::FdrIndependent => rvalues_with(dataset, config, FdrVariant::Independent),
        Method::FdrGeneralDep => rvalues_with(dataset, config, FdrVariant::GeneralDependence),
        Method::FdrThresholdDep => {
            let t = config.t.ok_or_else(|| {
                Error::InvalidConfig("the threshold-dependence method needs t".into())
            })?;
            rvalues_with(dataset, config, FdrVariant::ThresholdDependence { t })
        }
        Method::FwerBonferroni => Ok(bonferroni_rvalues_all(dataset, config)),
    }
}

/// Dataset positions declared replicated at level `q`, through the threshold
/// form of `method` (step-up for the FDR variants).
pub fn replicated_at(
    dataset: &Dataset,
    config: &AnalysisConfig,
    method: Method,
    q: f64,
) -> Result<Vec<usize>> {
    let variant = match method {
        Method::FwerBonferroni => return Ok(fwer::bonferroni_claims(dataset, config, q)),
        Method::FdrIndependent => FdrVariant::Independent,
        Method::FdrGeneralDep => FdrVariant::GeneralDependence,
        Method::FdrThresholdDep => FdrVariant::ThresholdDependence {
            t: config.t.ok_or_else(|| {
                Error::InvalidConfig("the threshold-dependence method needs t".into())
            })?,
        },
    };
    Ok(step_up_with(dataset, config, variant, q)?.replicated)
}
