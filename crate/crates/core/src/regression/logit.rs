//! Logistic regression by Newton/IRLS and the cluster-robust sandwich.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::design::{DesignMatrix, GroupCoding};
use crate::error::{Error, Result};
use crate::special::normal_two_sided_p;

/// Coefficients beyond this magnitude on the logit scale signal separation.
pub const SEPARATION_BOUND: f64 = 30.0;
const MAX_HALVINGS: usize = 20;
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on the absolute deviance change.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tol: 1e-8, max_iter: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VcovKind {
    Model,
    ClusterRobust,
    /// Supplied by the caller.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFit {
    pub column_names: Vec<String>,
    pub coding: GroupCoding,
    pub coefficients: Vec<f64>,
    pub vcov: Vec<Vec<f64>>,
    pub vcov_kind: VcovKind,
    pub std_errors: Vec<f64>,
    /// Wald statistic beta / SE, referred to the standard normal.
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n_rows: usize,
    pub n_unique_clusters: usize,
    pub converged: bool,
    pub iterations: usize,
    pub deviance: f64,
    /// Inverse observed information at the estimate.
    #[serde(skip)]
    pub model_vcov: Vec<Vec<f64>>,
}

impl RegressionFit {
    /// A fit with given coefficients and covariance, e.g. from published
    /// estimates.
    pub fn fixed(
        column_names: Vec<String>,
        coding: GroupCoding,
        coefficients: Vec<f64>,
        vcov: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = coefficients.len();
        if column_names.len() != k || vcov.len() != k || vcov.iter().any(|r| r.len() != k) {
            return Err(Error::Regression("coefficient and covariance dimensions differ".into()));
        }
        let mut fit = RegressionFit {
            column_names,
            coding,
            coefficients,
            vcov: vec![],
            vcov_kind: VcovKind::Fixed,
            std_errors: vec![],
            statistics: vec![],
            p_values: vec![],
            n_rows: 0,
            n_unique_clusters: 0,
            converged: true,
            iterations: 0,
            deviance: f64::NAN,
            model_vcov: vcov.clone(),
        };
        fit.set_vcov(to_matrix(&vcov), VcovKind::Fixed);
        Ok(fit)
    }

    pub fn beta(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coefficients)
    }

    pub fn vcov_matrix(&self) -> DMatrix<f64> {
        to_matrix(&self.vcov)
    }

    pub fn set_vcov(&mut self, v: DMatrix<f64>, kind: VcovKind) {
        self.std_errors = (0..v.nrows()).map(|i| v[(i, i)].max(0.0).sqrt()).collect();
        self.statistics = self
            .coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(b, se)| if *se > 0.0 { b / se } else { f64::NAN })
            .collect();
        self.p_values =
            self.statistics.iter().map(|z| if z.is_finite() { normal_two_sided_p(*z) } else { f64::NAN }).collect();
        self.vcov = from_matrix(&v);
        self.vcov_kind = kind;
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.column_names.iter().position(|c| c == name).map(|i| self.coefficients[i])
    }
}

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

pub(crate) fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub(crate) fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn deviance(y: &DVector<f64>, eta: &DVector<f64>) -> f64 {
    // -2 log L, with log p = -log(1 + e^-eta) computed stably
    let softplus = |t: f64| if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    2.0 * y.iter().zip(eta.iter()).map(|(&yi, &e)| if yi == 1.0 { softplus(-e) } else { softplus(e) }).sum::<f64>()
}

/// X' W X with W = diag(p (1 - p)).
fn information(x: &DMatrix<f64>, p: &DVector<f64>) -> DMatrix<f64> {
    let w = p.map(|pi| pi * (1.0 - pi));
    let mut xw = x.clone();
    for (mut row, wi) in xw.row_iter_mut().zip(w.iter()) {
        row *= *wi;
    }
    x.transpose() * xw
}

fn check_rank(design: &DesignMatrix) -> Result<()> {
    // modified Gram-Schmidt; a column nearly spanned by its predecessors is
    // reported by name
    let x = &design.x;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        let mut v = col;
        for q in &basis {
            let d = q.dot(&v);
            v -= q * d;
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= RANK_TOL * norm0.max(1.0) {
            return Err(Error::RankDeficient(design.column_names[j].clone()));
        }
        basis.push(v / norm);
    }
    Ok(())
}

fn invert_spd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Regression("information matrix is not positive definite".into()))
}

/// Maximum-likelihood logit fit. The returned covariance is model-based;
/// see [`cluster_robust_vcov`].
pub fn fit_logit(design: &DesignMatrix, opts: FitOptions) -> Result<RegressionFit> {
    let n = design.n_rows();
    if n == 0 {
        return Err(Error::Regression("no rows to fit".into()));
    }
    let ones = design.y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(Error::Separation(format!("outcome is constant ({} of {n} rows are 1)", ones)));
    }
    if n <= design.x.ncols() {
        return Err(Error::Regression("fewer rows than coefficients".into()));
    }
    check_rank(design)?;

    let x = &design.x;
    let y = &design.y;
    let mut beta = DVector::zeros(x.ncols());
    let mut eta = x * &beta;
    let mut dev = deviance(y, &eta);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let p = eta.map(logistic);
        let info = information(x, &p);
        let score = x.transpose() * (y - &p);
        let step = info
            .clone()
            .cholesky()
            .map(|c| c.solve(&score))
            .ok_or_else(|| Error::Separation("information matrix became singular".into()))?;

        let mut scale = 1.0;
        let mut halvings = 0;
        let (new_beta, new_eta, new_dev) = loop {
            let b = &beta + &step * scale;
            let e = x * &b;
            let d = deviance(y, &e);
            if d <= dev + 1e-12 * dev.abs().max(1.0) {
                break (b, e, d);
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::Separation("deviance failed to decrease".into()));
            }
            scale /= 2.0;
        };
        if let Some((j, b)) = new_beta.iter().enumerate().find(|(_, b)| b.abs() > SEPARATION_BOUND) {
            return Err(Error::Separation(format!("coefficient `{}` diverged to {b:.1}", design.column_names[j])));
        }
        let change = (dev - new_dev).abs();
        beta = new_beta;
        eta = new_eta;
        dev = new_dev;
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(iterations));
    }

    let p = eta.map(logistic);
    let model_vcov = invert_spd(&information(x, &p))?;
    let mut fit = RegressionFit {
        column_names: design.column_names.clone(),
        coding: design.coding.clone(),
        coefficients: beta.iter().copied().collect(),
        vcov: vec![],
        vcov_kind: VcovKind::Model,
        std_errors: vec![],
        statistics: vec![],
        p_values: vec![],
        n_rows: n,
        n_unique_clusters: design.n_clusters(),
        converged,
        iterations,
        deviance: dev,
        model_vcov: from_matrix(&model_vcov),
    };
    fit.set_vcov(model_vcov, VcovKind::Model);
    Ok(fit)
}

/// Score contributions x_i (y_i - p_i), one row per observation.
pub fn scores(fit: &RegressionFit, design: &DesignMatrix) -> DMatrix<f64> {
    let p = (&design.x * fit.beta()).map(logistic);
    let resid = &design.y - p;
    let mut s = design.x.clone();
    for (mut row, r) in s.row_iter_mut().zip(resid.iter()) {
        row *= *r;
    }
    s
}

/// Sandwich V = A^-1 B A^-1 with A the observed information,
/// B = G/(G-1) sum_g s_g s_g' over per-cluster score sums.
pub fn cluster_robust_vcov(fit: &RegressionFit, design: &DesignMatrix) -> Result<DMatrix<f64>> {
    let g = design.n_clusters();
    if g < 2 {
        return Err(Error::Regression(format!("cluster-robust covariance needs at least 2 clusters, got {g}")));
    }
    let p = (&design.x * fit.beta()).map(logistic);
    let bread = invert_spd(&information(&design.x, &p))?;
    let s = scores(fit, design);
    let k = design.x.ncols();
    let mut sums = DMatrix::zeros(g, k);
    for (i, &c) in design.clusters.iter().enumerate() {
        let mut row = sums.row_mut(c);
        row += s.row(i);
    }
    let meat = sums.transpose() * &sums * (g as f64 / (g as f64 - 1.0));
    let v = &bread * meat * &bread;
    Ok((&v + v.transpose()) * 0.5)
}

/// Fit plus cluster-robust covariance in one step.
pub fn fit_logit_clustered(design: &DesignMatrix, opts: FitOptions) -> Result<RegressionFit> {
    let mut fit = fit_logit(design, opts)?;
    let v = cluster_robust_vcov(&fit, design)?;
    fit.set_vcov(v, VcovKind::ClusterRobust);
    Ok(fit)
}
