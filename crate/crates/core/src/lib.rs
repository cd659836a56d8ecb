//! Percentile-based citation impact analysis.
//!
//! The crate turns publication records (citation counts or pre-assigned
//! percentiles) into percentile rank classes, the I3 indicator, top-10%
//! shares, nonparametric and chi-square tests, a cluster-robust logistic
//! regression with predictive margins, and chart specifications.

pub mod classes;
pub mod corpus;
pub mod error;
pub mod indicators;
pub mod inference;
pub mod percentile;
pub mod regression;
pub mod report;
pub mod special;
pub mod stats;
pub mod tables;
pub mod viz;

pub use classes::{classify, distribution, ClassScheme, RankClassDistribution};
pub use corpus::{
    load_path, regression_subset, summary_table, Corpus, DocType, InputFormat, LoadOptions, Loaded, PublicationRecord,
};
pub use error::{Error, Result, RowError};
pub use indicators::{h_index, i3, summary_stats, top10_share, CiMethod, IndicatorReport};
pub use inference::{TestResult, DEFAULT_ALPHA};
pub use percentile::{assign_percentile, PercentileAssignment, PercentileScheme, ReferenceSet};
pub use regression::{fit_logit, FitOptions, MarginsResult, RegressionFit};
pub use report::{Report, ReportConfig};
