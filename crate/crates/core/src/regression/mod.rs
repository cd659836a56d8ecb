//! Binary logistic regression of top-10% membership on group, pages and
//! author count, with cluster-robust errors and predictive margins.

mod design;
mod logit;
mod margins;

pub use design::{build_design, DesignMatrix, GroupCoding, AUTHORS, INTERCEPT, PAGES};
pub use logit::{
    cluster_robust_vcov, fit_logit, fit_logit_clustered, scores, FitOptions, RegressionFit, VcovKind, SEPARATION_BOUND,
};
pub use margins::{
    adjusted_predictions, contrast, margins, pairwise_contrasts, stars, AdjustedPrediction, Contrast, MarginsResult,
};

use serde::Serialize;

use crate::corpus::{regression_subset, Corpus, SubsetCounts};
use crate::error::Result;
use crate::stats;

/// Unclustered descriptive statistics of one model variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

pub fn describe_design(design: &DesignMatrix) -> Vec<VariableSummary> {
    let mut out = Vec::new();
    let mut push = |name: &str, xs: Vec<f64>| {
        let (min, max) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        out.push(VariableSummary {
            name: name.to_string(),
            mean: stats::mean(&xs),
            sd: stats::sample_sd(&xs).unwrap_or(0.0),
            min,
            max,
        });
    };
    push("PR(2)", design.y.iter().copied().collect());
    for (j, name) in design.column_names.iter().enumerate().skip(1) {
        push(name, design.x.column(j).iter().copied().collect());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionAnalysis {
    pub counts: SubsetCounts,
    pub variables: Vec<VariableSummary>,
    pub fit: RegressionFit,
    pub margins: MarginsResult,
}

/// The complete model: subset, design, clustered fit, contrasts and adjusted
/// predictions. `Ok(None)` when no record has all covariates.
pub fn analyse(
    corpus: &Corpus,
    reference: Option<&str>,
    opts: FitOptions,
    level: f64,
) -> Result<Option<RegressionAnalysis>> {
    let (subset, counts) = regression_subset(corpus);
    if counts.is_empty() {
        return Ok(None);
    }
    let design = build_design(&subset, reference)?;
    let fit = fit_logit_clustered(&design, opts)?;
    let margins = margins(&fit, &design, level)?;
    Ok(Some(RegressionAnalysis { counts, variables: describe_design(&design), fit, margins }))
}
