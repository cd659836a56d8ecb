use serde::Serialize;

use super::boxplot::trim_num;
use crate::classes::{ClassScheme, RankClassDistribution, SchemeName};
use crate::error::{Error, Result};
use crate::indicators::IndicatorReport;
use crate::inference::ChiSquareDecomposition;
use crate::regression::MarginsResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceLine {
    pub value: f64,
    pub style: LineStyle,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Bars,
    /// Point estimates with intervals.
    Points,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bar {
    pub group: String,
    pub category: String,
    pub value: f64,
    pub count: Option<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBar {
    pub group: String,
    pub category: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub group: String,
    pub category: String,
    pub value: f64,
    pub text: String,
}

/// Grouped bars: one panel per group, one bar per category.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarChartSpec {
    pub title: String,
    pub kind: ChartKind,
    pub y_label: String,
    pub y_max: f64,
    pub groups: Vec<String>,
    pub categories: Vec<String>,
    pub bars: Vec<Bar>,
    pub error_bars: Vec<ErrorBar>,
    pub reference_lines: Vec<ReferenceLine>,
    pub annotations: Vec<Annotation>,
}

fn nice_ceiling(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(x.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= x {
            return m * mag;
        }
    }
    10.0 * mag
}

impl BarChartSpec {
    fn fit_axis(&mut self) {
        let top = self
            .bars
            .iter()
            .map(|b| b.value)
            .chain(self.error_bars.iter().map(|e| e.upper))
            .chain(self.reference_lines.iter().map(|r| r.value))
            .fold(0.0, f64::max);
        self.y_max = nice_ceiling(top * 1.1);
    }
}

/// Class label carrying the expected share, e.g. `5% (exp 4)`.
pub fn class_label_with_expected(label: &str, expected_share: f64) -> String {
    format!("{label} (exp {})", trim_num(expected_share * 100.0))
}

/// Shares per PR(6) class as percentages, with each cell's chi-square
/// contribution above its bar.
pub fn pr6_bar_chart(
    distributions: &[RankClassDistribution],
    decomposition: &ChiSquareDecomposition,
) -> Result<BarChartSpec> {
    let scheme = ClassScheme::pr6();
    if distributions.len() != decomposition.observed.len() {
        return Err(Error::Viz("distributions and chi-square table have different group counts".into()));
    }
    let categories: Vec<String> =
        scheme.classes.iter().map(|c| class_label_with_expected(&c.label, c.expected_share)).collect();
    let mut bars = Vec::new();
    let mut annotations = Vec::new();
    for (d, (obs, contrib)) in distributions.iter().zip(decomposition.observed.iter().zip(&decomposition.contributions))
    {
        if d.scheme != SchemeName::PR6 || obs.len() != scheme.len() {
            return Err(Error::Viz(format!("group `{}` is not on the PR6 grid", d.group)));
        }
        if d.counts.iter().zip(obs).any(|(&c, &o)| c as f64 != o) {
            return Err(Error::Viz(format!("counts for `{}` do not match the chi-square table", d.group)));
        }
        for (i, cat) in categories.iter().enumerate() {
            let value = d.shares[i] * 100.0;
            bars.push(Bar {
                group: d.group.clone(),
                category: cat.clone(),
                value,
                count: Some(d.counts[i]),
                label: format!("{value:.2}"),
            });
            annotations.push(Annotation {
                group: d.group.clone(),
                category: cat.clone(),
                value: contrib[i],
                text: format!("{:.1}", contrib[i]),
            });
        }
    }
    let mut spec = BarChartSpec {
        title: "Publications per PR(6) class (%), chi-square contribution above each bar".into(),
        kind: ChartKind::Bars,
        y_label: "Percent of publications".into(),
        y_max: 0.0,
        groups: distributions.iter().map(|d| d.group.clone()).collect(),
        categories,
        bars,
        error_bars: vec![],
        reference_lines: vec![],
        annotations,
    };
    spec.fit_axis();
    Ok(spec)
}

const TOP10: &str = "10%";

/// Top-10% shares in percent with confidence intervals, the expected 10%
/// (solid) and the pooled share over all groups (dashed).
pub fn top10_bar_chart(reports: &[IndicatorReport]) -> BarChartSpec {
    let mut bars = Vec::new();
    let mut error_bars = Vec::new();
    let (mut hits, mut total) = (0usize, 0usize);
    for r in reports {
        let t = &r.top10;
        hits += t.count;
        total += t.n;
        bars.push(Bar {
            group: r.group.clone(),
            category: TOP10.into(),
            value: t.share * 100.0,
            count: Some(t.count),
            label: format!("{}%", trim_num((t.share * 100.0 * 100.0).round() / 100.0)),
        });
        error_bars.push(ErrorBar {
            group: r.group.clone(),
            category: TOP10.into(),
            lower: t.lower * 100.0,
            upper: t.upper * 100.0,
        });
    }
    let mut reference_lines =
        vec![ReferenceLine { value: 10.0, style: LineStyle::Solid, label: "expected 10%".into() }];
    if total > 0 {
        let pooled = hits as f64 / total as f64 * 100.0;
        reference_lines.push(ReferenceLine {
            value: pooled,
            style: LineStyle::Dashed,
            label: format!("all groups {}%", trim_num(pooled)),
        });
    }
    let level = reports.first().map_or(0.95, |r| r.top10.level);
    let mut spec = BarChartSpec {
        title: format!("Share of top-10% publications with {}% CI", trim_num(level * 100.0)),
        kind: ChartKind::Bars,
        y_label: "Percent in class 10%".into(),
        y_max: 0.0,
        groups: reports.iter().map(|r| r.group.clone()).collect(),
        categories: vec![TOP10.into()],
        bars,
        error_bars,
        reference_lines,
        annotations: vec![],
    };
    spec.fit_axis();
    spec
}

/// Adjusted predictions on the probability scale with their intervals.
pub fn margins_chart(margins: &MarginsResult) -> BarChartSpec {
    let mut preds: Vec<_> = margins.predictions.iter().collect();
    preds.sort_by(|a, b| a.group.cmp(&b.group));
    let category = "Pr(top 10%)".to_string();
    let bars = preds
        .iter()
        .map(|p| Bar {
            group: p.group.clone(),
            category: category.clone(),
            value: p.prediction,
            count: None,
            label: format!("{:.3}", p.prediction),
        })
        .collect();
    let error_bars = preds
        .iter()
        .map(|p| ErrorBar { group: p.group.clone(), category: category.clone(), lower: p.lower, upper: p.upper })
        .collect();
    let mut spec = BarChartSpec {
        title: format!("Adjusted predictions with {}% CI", trim_num(margins.level * 100.0)),
        kind: ChartKind::Points,
        y_label: "Predicted probability".into(),
        y_max: 0.0,
        groups: preds.iter().map(|p| p.group.clone()).collect(),
        categories: vec![category],
        bars,
        error_bars,
        reference_lines: vec![],
        annotations: vec![],
    };
    spec.fit_axis();
    spec
}
