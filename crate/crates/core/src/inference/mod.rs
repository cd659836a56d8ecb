//! Significance tests: normality pre-test, Kruskal-Wallis H-test,
//! Bonferroni-corrected pairwise rank tests, and the chi-square test of
//! independence with per-cell decomposition.

mod chi_square;
pub(crate) mod normality;
mod rank;

pub use chi_square::{chi_square_independence, ChiSquareDecomposition};
pub use normality::{normality_test, sample_skewness, NormalityDetail};
pub use rank::{
    bonferroni, kruskal_wallis, mann_whitney, pairwise_rank_tests, KruskalWallisDetail, PairwiseComparison,
    PairwiseTable,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Significance level used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    Normality,
    KruskalWallis,
    PairwiseRank,
    ChiSquareIndependence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Normality(NormalityDetail),
    KruskalWallis(KruskalWallisDetail),
    ChiSquare(ChiSquareDecomposition),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub test_name: TestName,
    pub statistic: f64,
    pub df: Option<u32>,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    /// The statistic was defined by convention (e.g. every value tied).
    pub degenerate: bool,
    pub payload: Payload,
}

impl TestResult {
    fn new(test_name: TestName, statistic: f64, df: Option<u32>, p_value: f64, alpha: f64, payload: Payload) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            test_name,
            statistic,
            df,
            p_value,
            alpha,
            significant: p_value < alpha,
            degenerate: false,
            payload,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Inference(format!("alpha {alpha} outside (0, 1)")))
    }
}
