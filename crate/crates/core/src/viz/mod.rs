//! Plot specifications for the percentile figures and a small deterministic
//! SVG renderer.
//!
//! Every spec is a pure function of its inputs and serializes to JSON with
//! stable field names.

mod bars;
mod boxplot;
mod svg;
mod violin;

pub use bars::{
    margins_chart, pr6_bar_chart, top10_bar_chart, Annotation, Bar, BarChartSpec, ChartKind, ErrorBar, LineStyle,
    ReferenceLine,
};
pub use boxplot::{boxplots_by_year, BoxEntry, BoxPlotSpec, GroupLabel};
pub use svg::{render_svg, ChartSpec};
pub use violin::{kde_reflected, silverman_bandwidth, trapezoid, violin, Bandwidth, ViolinGroup, ViolinSpec};
