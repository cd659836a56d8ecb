use serde::Serialize;

use super::bars::{LineStyle, ReferenceLine};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::inference::PairwiseTable;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxEntry {
    pub group: String,
    pub year: i32,
    pub n: usize,
    /// Drawn as a cross.
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLabel {
    pub group: String,
    pub median_all_years: f64,
    /// Groups that differ significantly in the pairwise rank tests.
    pub differs_from: Vec<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxPlotSpec {
    pub boxplot: Vec<BoxEntry>,
    pub group_labels: Vec<GroupLabel>,
    pub years: Vec<i32>,
    pub reference_lines: Vec<ReferenceLine>,
    pub notices: Vec<String>,
}

/// One box per group and year; years without records are omitted with a
/// notice.
pub fn boxplots_by_year(
    corpus: &Corpus,
    groups: &[&str],
    years: &[i32],
    pairwise: Option<&PairwiseTable>,
) -> Result<BoxPlotSpec> {
    let mut boxes = Vec::new();
    let mut labels = Vec::new();
    let mut notices = Vec::new();
    for &g in groups {
        let all: Vec<f64> = corpus.group_percentiles(g);
        if all.is_empty() {
            return Err(Error::Viz(format!("group `{g}` has no percentiles")));
        }
        for &y in years {
            let vals: Vec<f64> = corpus.group_records(g).filter(|r| r.year == y).filter_map(|r| r.percentile).collect();
            if vals.is_empty() {
                notices.push(format!("{g}: no records in {y}, box omitted"));
                continue;
            }
            let f = stats::five_number(&stats::sorted(&vals));
            boxes.push(BoxEntry {
                group: g.to_string(),
                year: y,
                n: vals.len(),
                median: f.median,
                q1: f.q1,
                q3: f.q3,
                lower_whisker: f.lower_adjacent,
                upper_whisker: f.upper_adjacent,
            });
        }
        let median_all_years = stats::median_sorted(&stats::sorted(&all));
        let differs_from: Vec<String> =
            pairwise.map(|t| t.significant_partners(g).into_iter().map(String::from).collect()).unwrap_or_default();
        let mut text = format!("{g} (med={})", trim_num(median_all_years));
        if !differs_from.is_empty() {
            text.push_str(&format!(" differs from {}", differs_from.join(", ")));
        }
        labels.push(GroupLabel { group: g.to_string(), median_all_years, differs_from, text });
    }
    Ok(BoxPlotSpec {
        boxplot: boxes,
        group_labels: labels,
        years: years.to_vec(),
        reference_lines: vec![ReferenceLine {
            value: 50.0,
            style: LineStyle::Solid,
            label: "average impact (50)".into(),
        }],
        notices,
    })
}

/// Up to two decimals without trailing zeros.
pub(crate) fn trim_num(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}
