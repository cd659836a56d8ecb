//! End-to-end analysis: percentiles, classes, indicators, tests, regression
//! and figure specs for one corpus.

use serde::Serialize;

use crate::classes::{distribution, ClassScheme, RankClassDistribution};
use crate::corpus::{summary_table, Corpus, Loaded, SummaryTable};
use crate::error::{Result, RowError};
use crate::indicators::{indicator_report, summary_stats, CiMethod, IndicatorReport, SummaryStats};
use crate::inference::{
    chi_square_independence, kruskal_wallis, normality_test, pairwise_rank_tests, PairwiseTable, Payload, TestResult,
    DEFAULT_ALPHA,
};
use crate::percentile::{fill_missing_percentiles, PercentileScheme};
use crate::regression::{analyse, FitOptions, RegressionAnalysis};
use crate::viz::{
    boxplots_by_year, margins_chart, pr6_bar_chart, top10_bar_chart, violin, Bandwidth, BarChartSpec, BoxPlotSpec,
    ViolinSpec,
};

pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub scheme: PercentileScheme,
    pub ci_method: CiMethod,
    pub ci_level: f64,
    pub alpha: f64,
    pub reference_group: Option<String>,
    #[serde(skip)]
    pub fit: FitOptions,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            scheme: PercentileScheme::IncitesGe,
            ci_method: CiMethod::Wilson,
            ci_level: 0.95,
            alpha: DEFAULT_ALPHA,
            reference_group: None,
            fit: FitOptions::default(),
        }
    }
}

/// A report section that either ran or was skipped for a stated reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok { result: T },
    NotApplicable { reason: String },
}

impl<T> Section<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok { result } => Some(result),
            Section::NotApplicable { .. } => None,
        }
    }

    fn skip(reason: impl Into<String>) -> Self {
        Section::NotApplicable { reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSummary {
    pub records: usize,
    pub pairs: usize,
    pub unique_publications: usize,
    pub groups: Vec<String>,
    pub years: Vec<i32>,
    pub percentiles_assigned: usize,
    pub rejected_rows: Vec<RowError>,
    pub flagged_rows: Vec<RowError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tests {
    pub normality: Section<TestResult>,
    pub kruskal_wallis: Section<TestResult>,
    pub pairwise: Section<PairwiseTable>,
    pub chi_square: Section<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figures {
    pub violin: ViolinSpec,
    pub boxplot: BoxPlotSpec,
    pub pr6_bars: Section<BarChartSpec>,
    pub top10_bars: BarChartSpec,
    pub margins: Section<BarChartSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ReportConfig,
    pub input: InputSummary,
    pub publications: SummaryTable,
    pub indicators: Vec<IndicatorReport>,
    pub total: SummaryStats,
    pub tests: Tests,
    pub regression: Section<RegressionAnalysis>,
    pub figures: Figures,
    pub notices: Vec<String>,
}

/// Runs the whole analysis on a loaded corpus.
pub fn run(loaded: &Loaded, config: &ReportConfig) -> Result<Report> {
    let mut notices = Vec::new();
    let (corpus, assignment) = fill_missing_percentiles(&loaded.corpus, config.scheme)?;
    notices.extend(assignment.warnings.iter().cloned());
    let corpus = with_percentiles_only(&corpus, &mut notices);
    if corpus.is_empty() {
        return Err(crate::Error::Corpus("no record carries a usable percentile".into()));
    }

    let groups: Vec<&str> = corpus.groups();
    let table = summary_table(&corpus);
    let percentiles: Vec<Vec<f64>> = groups.iter().map(|g| corpus.group_percentiles(g)).collect();

    let mut indicators = Vec::with_capacity(groups.len());
    for (g, ps) in groups.iter().zip(&percentiles) {
        let cites = corpus.group_citations(g);
        indicators.push(indicator_report(g, ps, cites.as_deref(), config.ci_level, config.ci_method)?);
    }
    let pooled: Vec<f64> =
        corpus.records().iter().flat_map(|r| r.groups.iter().map(move |_| r.percentile)).flatten().collect();
    let total = summary_stats(&pooled)?;

    let tests = run_tests(&groups, &percentiles, &pooled, &indicators, config)?;

    let regression = match analyse(&corpus, config.reference_group.as_deref(), config.fit, config.ci_level)? {
        Some(a) if groups.len() >= 2 => Section::Ok { result: a },
        Some(_) => Section::skip("regression needs at least two groups"),
        None => {
            notices.push("regression skipped: no record has percentile, pages and n_authors".into());
            Section::skip("zero usable rows")
        }
    };

    let named: Vec<(&str, &[f64])> = groups.iter().copied().zip(percentiles.iter().map(Vec::as_slice)).collect();
    let violin_spec = violin(&named, Bandwidth::Silverman, DEFAULT_GRID_POINTS)?;
    let boxplot = boxplots_by_year(&corpus, &groups, &table.years, tests.pairwise.ok())?;
    notices.extend(boxplot.notices.iter().cloned());
    let pr6_bars = match tests.chi_square.ok().map(|t| &t.payload) {
        Some(Payload::ChiSquare(dec)) => {
            let dists: Vec<RankClassDistribution> = indicators.iter().map(|r| r.pr6.clone()).collect();
            Section::Ok { result: pr6_bar_chart(&dists, dec)? }
        }
        _ => Section::skip("chi-square decomposition not available"),
    };
    let margins = match regression.ok() {
        Some(a) => Section::Ok { result: margins_chart(&a.margins) },
        None => Section::skip("no regression model"),
    };

    Ok(Report {
        config: config.clone(),
        input: InputSummary {
            records: corpus.records().len(),
            pairs: corpus.n_pairs(),
            unique_publications: corpus.n_unique(),
            groups: groups.iter().map(|g| g.to_string()).collect(),
            years: table.years.clone(),
            percentiles_assigned: assignment.assignments.len(),
            rejected_rows: loaded.rejected.clone(),
            flagged_rows: loaded.flagged.clone(),
        },
        publications: table,
        indicators: indicators.clone(),
        total,
        tests,
        regression,
        figures: Figures { violin: violin_spec, boxplot, pr6_bars, top10_bars: top10_bar_chart(&indicators), margins },
        notices,
    })
}

fn with_percentiles_only(corpus: &Corpus, notices: &mut Vec<String>) -> Corpus {
    let kept: Vec<_> = corpus.records().iter().filter(|r| r.percentile.is_some()).cloned().collect();
    let dropped = corpus.records().len() - kept.len();
    if dropped > 0 {
        notices.push(format!("{dropped} record(s) without a percentile left out of the analysis"));
        corpus.with_records(kept)
    } else {
        corpus.clone()
    }
}

fn run_tests(
    groups: &[&str],
    percentiles: &[Vec<f64>],
    pooled: &[f64],
    indicators: &[IndicatorReport],
    config: &ReportConfig,
) -> Result<Tests> {
    let alpha = config.alpha;
    let normality = if pooled.len() >= crate::inference::normality::MIN_SAMPLE && pooled.iter().any(|&p| p != pooled[0])
    {
        Section::Ok { result: normality_test(pooled, alpha)? }
    } else {
        Section::skip("normality test needs at least 8 non-constant values")
    };
    if groups.len() < 2 {
        let reason = "only one group";
        return Ok(Tests {
            normality,
            kruskal_wallis: Section::skip(reason),
            pairwise: Section::skip(reason),
            chi_square: Section::skip(reason),
        });
    }
    let slices: Vec<&[f64]> = percentiles.iter().map(Vec::as_slice).collect();
    let kruskal = if pooled.len() >= 3 {
        Section::Ok { result: kruskal_wallis(&slices, alpha)? }
    } else {
        Section::skip("fewer than three observations")
    };
    let named: Vec<(&str, &[f64])> = groups.iter().copied().zip(slices.iter().copied()).collect();
    let pairwise = Section::Ok { result: pairwise_rank_tests(&named, alpha)? };

    let table: Vec<Vec<f64>> = indicators.iter().map(|r| r.pr6.counts.iter().map(|&c| c as f64).collect()).collect();
    let pr6 = ClassScheme::pr6();
    let empty: Vec<&str> = (0..pr6.len())
        .filter(|&c| table.iter().all(|row| row[c] == 0.0))
        .map(|c| pr6.classes[c].label.as_str())
        .collect();
    let chi_square = if empty.is_empty() {
        Section::Ok { result: chi_square_independence(&table, alpha)? }
    } else {
        Section::skip(format!("empty PR(6) class(es): {}", empty.join(", ")))
    };
    Ok(Tests { normality, kruskal_wallis: kruskal, pairwise, chi_square })
}

/// Single-group helper used by the CLI `classify` command.
pub fn class_distributions(corpus: &Corpus, scheme: &ClassScheme) -> Result<Vec<RankClassDistribution>> {
    corpus.groups().into_iter().map(|g| distribution(g, &corpus.group_percentiles(g), scheme)).collect()
}
