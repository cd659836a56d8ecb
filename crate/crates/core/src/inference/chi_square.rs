use serde::Serialize;

use super::{check_alpha, Payload, TestName, TestResult};
use crate::error::{Error, Result};
use crate::special::chi2_sf;

/// Cell-wise breakdown of a chi-square statistic. Rows are groups, columns
/// are classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareDecomposition {
    pub observed: Vec<Vec<f64>>,
    pub expected: Vec<Vec<f64>>,
    /// (O - E)^2 / E per cell.
    pub contributions: Vec<Vec<f64>>,
    /// Sum of contributions per row (group).
    pub row_totals: Vec<f64>,
    /// Sum of contributions per column (class).
    pub column_totals: Vec<f64>,
}

pub fn chi_square_independence(observed: &[Vec<f64>], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let rows = observed.len();
    let cols = observed.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::Inference(format!("chi-square test needs at least a 2x2 table, got {rows}x{cols}")));
    }
    if observed.iter().any(|r| r.len() != cols) {
        return Err(Error::Inference("ragged contingency table".into()));
    }
    if observed.iter().flatten().any(|&o| !(o >= 0.0 && o.is_finite())) {
        return Err(Error::Inference("negative or non-finite count".into()));
    }
    let row_sum: Vec<f64> = observed.iter().map(|r| r.iter().sum()).collect();
    let col_sum: Vec<f64> = (0..cols).map(|c| observed.iter().map(|r| r[c]).sum()).collect();
    if let Some(r) = row_sum.iter().position(|&s| s == 0.0) {
        return Err(Error::Inference(format!("row {r} of the contingency table has a zero total")));
    }
    if let Some(c) = col_sum.iter().position(|&s| s == 0.0) {
        return Err(Error::Inference(format!("column {c} of the contingency table has a zero total")));
    }
    let total: f64 = row_sum.iter().sum();

    let expected: Vec<Vec<f64>> = row_sum.iter().map(|&r| col_sum.iter().map(|&c| r * c / total).collect()).collect();
    let contributions: Vec<Vec<f64>> = observed
        .iter()
        .zip(&expected)
        .map(|(o_row, e_row)| o_row.iter().zip(e_row).map(|(&o, &e)| (o - e) * (o - e) / e).collect())
        .collect();
    let row_totals: Vec<f64> = contributions.iter().map(|r| r.iter().sum()).collect();
    let column_totals: Vec<f64> = (0..cols).map(|c| contributions.iter().map(|r| r[c]).sum()).collect();
    let statistic: f64 = row_totals.iter().sum();
    let df = ((rows - 1) * (cols - 1)) as u32;
    let decomposition =
        ChiSquareDecomposition { observed: observed.to_vec(), expected, contributions, row_totals, column_totals };
    Ok(TestResult::new(
        TestName::ChiSquareIndependence,
        statistic,
        Some(df),
        chi2_sf(statistic, df as f64),
        alpha,
        Payload::ChiSquare(decomposition),
    ))
}
