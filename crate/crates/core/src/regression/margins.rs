//! Post-estimation: pairwise group contrasts on the linear-predictor scale
//! and adjusted predictions (predictive margins) with delta-method errors.

use nalgebra::DVector;
use serde::Serialize;

use super::design::DesignMatrix;
use super::logit::{logistic, RegressionFit};
use crate::error::{Error, Result};
use crate::inference::bonferroni;
use crate::special::{normal_quantile, normal_two_sided_p};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contrast {
    /// `"B vs A"`.
    pub label: String,
    pub group: String,
    pub versus: String,
    /// beta_group - beta_versus, with the reference coefficient fixed at 0.
    pub estimate: f64,
    pub se: f64,
    pub statistic: Option<f64>,
    pub raw_p: Option<f64>,
    pub adjusted_p: Option<f64>,
}

/// Contrast vector c with c'beta = beta_group - beta_versus.
fn contrast_vector(fit: &RegressionFit, group: &str, versus: &str) -> Result<DVector<f64>> {
    let mut c = DVector::zeros(fit.coefficients.len());
    let gi = fit.coding.index_of(group)?;
    let vi = fit.coding.index_of(versus)?;
    if let Some(col) = fit.coding.columns[gi] {
        c[col] += 1.0;
    }
    if let Some(col) = fit.coding.columns[vi] {
        c[col] -= 1.0;
    }
    Ok(c)
}

/// One contrast, unadjusted. A group against itself gives 0 with no p-value.
pub fn contrast(fit: &RegressionFit, group: &str, versus: &str) -> Result<Contrast> {
    let c = contrast_vector(fit, group, versus)?;
    let estimate = c.dot(&fit.beta());
    let var = (c.transpose() * fit.vcov_matrix() * &c)[(0, 0)];
    let se = var.max(0.0).sqrt();
    let (statistic, raw_p) = if group == versus || se == 0.0 {
        (None, None)
    } else {
        let z = estimate / se;
        (Some(z), Some(normal_two_sided_p(z)))
    };
    Ok(Contrast {
        label: format!("{group} vs {versus}"),
        group: group.to_string(),
        versus: versus.to_string(),
        estimate,
        se,
        statistic,
        raw_p,
        adjusted_p: raw_p,
    })
}

/// All k(k-1)/2 contrasts "later vs earlier" in label order, with
/// Bonferroni-adjusted p-values.
pub fn pairwise_contrasts(fit: &RegressionFit) -> Result<Vec<Contrast>> {
    let labels = &fit.coding.labels;
    let k = labels.len();
    let m = k * (k - 1) / 2;
    let mut out = Vec::with_capacity(m);
    for i in 0..k {
        for j in i + 1..k {
            let mut c = contrast(fit, &labels[j], &labels[i])?;
            c.adjusted_p = c.raw_p.map(|p| bonferroni(p, m));
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedPrediction {
    pub group: String,
    pub prediction: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginsResult {
    pub predictions: Vec<AdjustedPrediction>,
    pub contrasts: Vec<Contrast>,
    pub level: f64,
}

/// Average predicted probability with every row counterfactually assigned to
/// each group in turn, covariates at their observed values. The standard
/// error uses the delta method with the fit's covariance.
pub fn adjusted_predictions(fit: &RegressionFit, design: &DesignMatrix, level: f64) -> Result<Vec<AdjustedPrediction>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Regression(format!("confidence level {level} outside (0, 1)")));
    }
    if design.n_rows() == 0 {
        return Err(Error::Regression("no rows to average over".into()));
    }
    let z = normal_quantile(0.5 + level / 2.0);
    let beta = fit.beta();
    let v = fit.vcov_matrix();
    let n = design.n_rows() as f64;
    fit.coding
        .labels
        .iter()
        .map(|label| {
            let x = design.with_group(label)?;
            let p = (&x * &beta).map(logistic);
            let prediction = p.sum() / n;
            let w = p.map(|pi| pi * (1.0 - pi));
            let jac = x.transpose() * w / n;
            let se = (jac.transpose() * &v * &jac)[(0, 0)].max(0.0).sqrt();
            Ok(AdjustedPrediction {
                group: label.clone(),
                prediction,
                se,
                lower: (prediction - z * se).max(0.0),
                upper: (prediction + z * se).min(1.0),
                level,
            })
        })
        .collect()
}

pub fn margins(fit: &RegressionFit, design: &DesignMatrix, level: f64) -> Result<MarginsResult> {
    Ok(MarginsResult {
        predictions: adjusted_predictions(fit, design, level)?,
        contrasts: pairwise_contrasts(fit)?,
        level,
    })
}

/// Significance stars: * p < .05, ** p < .01, *** p < .001.
pub fn stars(p: Option<f64>) -> &'static str {
    match p {
        Some(p) if p < 0.001 => "***",
        Some(p) if p < 0.01 => "**",
        Some(p) if p < 0.05 => "*",
        _ => "",
    }
}
