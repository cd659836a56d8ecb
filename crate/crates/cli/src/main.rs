use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use percentile_impact::percentile::fill_missing_percentiles;
use percentile_impact::report::{class_distributions, run, Section};
use percentile_impact::tables::{render_tables, Style};
use percentile_impact::viz::{render_svg, ChartSpec};
use percentile_impact::{
    corpus, CiMethod, ClassScheme, Error, LoadOptions, Loaded, PercentileScheme, Report, ReportConfig, DEFAULT_ALPHA,
};

const NO_COLOR_ENV: &str = "PERCENTILE_IMPACT_NO_COLOR";
const FIG_WIDTH: u32 = 800;
const FIG_HEIGHT: u32 = 500;

#[derive(Parser)]
#[command(name = "percentile-impact", version, about = "Percentile-based citation impact analysis")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Publication records (CSV or JSON)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Scheme::IncitesGe)]
    scheme: Scheme,
    #[arg(long, global = true, value_enum, default_value_t = Ci::Wilson)]
    ci: Ci,
    /// Confidence level of intervals
    #[arg(long, global = true, default_value_t = 0.95)]
    ci_level: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Reference group of the regression (default: first label)
    #[arg(long, global = true)]
    ref_group: Option<String>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Treat any rejected row as a fatal validation error
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: report.json, tables.txt and fig1.svg..fig5.svg
    Report,
    /// Check the input and list rejected or flagged rows
    Validate,
    /// Fill in percentiles from citation counts and write the records as CSV
    Percentiles,
    /// Rank-class distribution per group
    Classify {
        #[arg(long, value_enum, default_value_t = Classes::Pr6)]
        classes: Classes,
    },
    /// I3, top-10% share, summary statistics and h-index per group
    Indicators,
    /// Normality, Kruskal-Wallis, pairwise and chi-square tests
    Test,
    /// Cluster-robust logistic regression with contrasts and margins
    Regress,
    /// Write fig1.svg..fig5.svg only
    Plot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Scheme {
    IncitesGe,
    ComplementExclusive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ci {
    Wilson,
    Wald,
}

#[derive(Clone, Copy, ValueEnum)]
enum Classes {
    Pr6,
    Pr2,
}

/// A failure with its exit code: 1 for input problems, 2 for statistics.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_statistical() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: 1, message: format!("io: {}: {e}", path.display()) }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn config(c: &Common) -> Result<ReportConfig, Failure> {
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", c.alpha)));
    }
    if !(c.ci_level > 0.0 && c.ci_level < 1.0) {
        return Err(usage(format!("--ci-level must lie in (0, 1), got {}", c.ci_level)));
    }
    Ok(ReportConfig {
        scheme: match c.scheme {
            Scheme::IncitesGe => PercentileScheme::IncitesGe,
            Scheme::ComplementExclusive => PercentileScheme::ComplementExclusive,
        },
        ci_method: match c.ci {
            Ci::Wilson => CiMethod::Wilson,
            Ci::Wald => CiMethod::Wald,
        },
        ci_level: c.ci_level,
        alpha: c.alpha,
        reference_group: c.ref_group.clone(),
        ..ReportConfig::default()
    })
}

fn load(c: &Common) -> Result<Loaded, Failure> {
    let path = c.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    let opts = LoadOptions {
        format: match c.format {
            Format::Csv => corpus::InputFormat::Csv,
            Format::Json => corpus::InputFormat::Json,
        },
        fail_fast: c.strict,
        ..LoadOptions::default()
    };
    let loaded = corpus::load_path(path, &opts)?;
    for r in &loaded.rejected {
        eprintln!("rejected {r}");
    }
    for r in &loaded.flagged {
        eprintln!("flagged {r}");
    }
    if c.strict && !loaded.rejected.is_empty() {
        return Err(Error::InvalidRows(loaded.rejected.clone()).into());
    }
    Ok(loaded)
}

fn color_enabled() -> bool {
    std::env::var_os(NO_COLOR_ENV).is_none() && io::stdout().is_terminal()
}

fn out_dir(c: &Common) -> Result<PathBuf, Failure> {
    let dir = c.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(format!("json: {e}")))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| usage(format!("io: stdout: {e}")))
}

fn analyse(c: &Common) -> Result<Report, Failure> {
    let cfg = config(c)?;
    let loaded = load(c)?;
    let report = run(&loaded, &cfg)?;
    for n in &report.notices {
        eprintln!("notice: {n}");
    }
    Ok(report)
}

fn figures(report: &Report) -> Result<Vec<(&'static str, String)>, Failure> {
    let f = &report.figures;
    let mut out = vec![
        ("fig1.svg", render_svg(ChartSpec::Violin(&f.violin), FIG_WIDTH, FIG_HEIGHT)?),
        ("fig2.svg", render_svg(ChartSpec::BoxPlot(&f.boxplot), FIG_WIDTH, FIG_HEIGHT)?),
    ];
    out.push(("fig3.svg", optional_figure(&f.pr6_bars, "PR(6) classes")?));
    out.push(("fig4.svg", render_svg(ChartSpec::Bars(&f.top10_bars), FIG_WIDTH, FIG_HEIGHT)?));
    out.push(("fig5.svg", optional_figure(&f.margins, "Adjusted predictions")?));
    Ok(out)
}

fn optional_figure(section: &Section<percentile_impact::viz::BarChartSpec>, title: &str) -> Result<String, Failure> {
    Ok(match section {
        Section::Ok { result } => render_svg(ChartSpec::Bars(result), FIG_WIDTH, FIG_HEIGHT)?,
        Section::NotApplicable { reason } => placeholder_svg(title, reason),
    })
}

/// An otherwise empty figure stating why the chart was not drawn.
fn placeholder_svg(title: &str, reason: &str) -> String {
    let esc = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;");
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{FIG_WIDTH}\" height=\"{FIG_HEIGHT}\" \
         viewBox=\"0 0 {FIG_WIDTH} {FIG_HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"40\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">not applicable: {}</text>\n\
         </svg>\n",
        FIG_WIDTH / 2,
        esc(title),
        FIG_WIDTH / 2,
        FIG_HEIGHT / 2,
        esc(reason)
    )
}

fn write_figures(report: &Report, dir: &Path) -> Result<(), Failure> {
    for (name, svg) in figures(report)? {
        write_file(&dir.join(name), &svg)?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Report => {
            let report = analyse(c)?;
            let dir = out_dir(c)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| usage(format!("json: {e}")))?;
            write_file(&dir.join("report.json"), &(json + "\n"))?;
            write_file(&dir.join("tables.txt"), &render_tables(&report, &Style { color: false }))?;
            write_figures(&report, &dir)?;
            print!("{}", render_tables(&report, &Style { color: color_enabled() }));
            Ok(())
        }
        Command::Validate => {
            let loaded = load(c)?;
            println!(
                "{} valid record(s), {} rejected, {} flagged, groups: {}",
                loaded.corpus.records().len(),
                loaded.rejected.len(),
                loaded.flagged.len(),
                loaded.corpus.groups().join(", ")
            );
            if loaded.rejected.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidRows(loaded.rejected).into())
            }
        }
        Command::Percentiles => {
            let cfg = config(c)?;
            let loaded = load(c)?;
            let (filled, runinfo) = fill_missing_percentiles(&loaded.corpus, cfg.scheme)?;
            for w in &runinfo.warnings {
                eprintln!("notice: {w}");
            }
            match &c.out_dir {
                Some(_) => {
                    let path = out_dir(c)?.join("percentiles.csv");
                    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
                    corpus::write_csv(&filled, file)?;
                }
                None => corpus::write_csv(&filled, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Classify { classes } => {
            let cfg = config(c)?;
            let loaded = load(c)?;
            let (filled, _) = fill_missing_percentiles(&loaded.corpus, cfg.scheme)?;
            let kept: Vec<_> = filled.records().iter().filter(|r| r.percentile.is_some()).cloned().collect();
            let scheme = match classes {
                Classes::Pr6 => ClassScheme::pr6(),
                Classes::Pr2 => ClassScheme::pr2(),
            };
            print_json(&class_distributions(&filled.with_records(kept), &scheme)?)
        }
        Command::Indicators => print_json(&analyse(c)?.indicators),
        Command::Test => print_json(&analyse(c)?.tests),
        Command::Regress => print_json(&analyse(c)?.regression),
        Command::Plot => {
            let report = analyse(c)?;
            write_figures(&report, &out_dir(c)?)
        }
    }
}
