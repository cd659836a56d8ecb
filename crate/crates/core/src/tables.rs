//! Plain-text rendering of the report tables.

use std::fmt::Write;

use crate::regression::stars;
use crate::report::{Report, Section};

pub struct Style {
    pub color: bool,
}

impl Style {
    fn head(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn row(cells: &[String], widths: &[usize]) -> String {
    let mut line = String::new();
    for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
        if i == 0 {
            let _ = write!(line, "{c:<w$}");
        } else {
            let _ = write!(line, "  {c:>w$}");
        }
    }
    line.trim_end().to_string()
}

fn table(out: &mut String, style: &Style, title: &str, header: Vec<String>, rows: Vec<Vec<String>>) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let _ = writeln!(out, "{}", style.head(title));
    let _ = writeln!(out, "{}", row(&header, &widths));
    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    for r in rows {
        let _ = writeln!(out, "{}", row(&r, &widths));
    }
    out.push('\n');
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

fn p_text(p: f64) -> String {
    if p < 0.001 {
        "< .001".into()
    } else {
        format!("{p:.3}")
    }
}

pub fn render_tables(report: &Report, style: &Style) -> String {
    let mut out = String::new();
    let t = &report.publications;

    let mut header = vec!["Publication year".to_string()];
    header.extend(t.groups.iter().cloned());
    header.push("Total".into());
    let mut rows: Vec<Vec<String>> = t
        .years
        .iter()
        .enumerate()
        .map(|(yi, y)| {
            let mut r = vec![y.to_string()];
            r.extend(t.counts.iter().map(|c| c[yi].to_string()));
            r.push(t.year_totals[yi].to_string());
            r
        })
        .collect();
    let mut total = vec!["Total".to_string()];
    total.extend(t.group_totals.iter().map(|c| c.to_string()));
    total.push(t.grand_total.to_string());
    rows.push(total);
    table(&mut out, style, "Publications per year and group", header, rows);

    let header = ["Group", "N", "Minimum", "Maximum", "Mean", "SD", "Median"].map(String::from).to_vec();
    let mut rows: Vec<Vec<String>> = report
        .indicators
        .iter()
        .map(|r| {
            let s = &r.summary;
            vec![r.group.clone(), s.n.to_string(), f2(s.min), f2(s.max), f2(s.mean), f2(s.sd), f2(s.median)]
        })
        .collect();
    let s = &report.total;
    rows.push(vec!["Total".into(), s.n.to_string(), f2(s.min), f2(s.max), f2(s.mean), f2(s.sd), f2(s.median)]);
    table(&mut out, style, "Summary percentile statistics", header, rows);

    let header = ["Group", "I3", "% of max", "Top 10%", "CI lower", "CI upper", "h-index"].map(String::from).to_vec();
    let rows = report
        .indicators
        .iter()
        .map(|r| {
            vec![
                r.group.clone(),
                format!("{}", r.i3),
                format!("{:.0}%", r.i3_pct_of_max * 100.0),
                format!("{:.2}%", r.top10.share * 100.0),
                format!("{:.2}%", r.top10.lower * 100.0),
                format!("{:.2}%", r.top10.upper * 100.0),
                r.h_index.map_or("-".into(), |h| h.to_string()),
            ]
        })
        .collect();
    table(&mut out, style, "Indicators", header, rows);

    let header = ["Test", "Statistic", "df", "p", "Significant"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for (name, sec) in [
        ("Skewness-kurtosis normality", &report.tests.normality),
        ("Kruskal-Wallis H", &report.tests.kruskal_wallis),
        ("Chi-square PR(6)", &report.tests.chi_square),
    ] {
        rows.push(match sec {
            Section::Ok { result } => vec![
                name.into(),
                f2(result.statistic),
                result.df.map_or("-".into(), |d| d.to_string()),
                p_text(result.p_value),
                if result.significant { "yes".into() } else { "no".into() },
            ],
            Section::NotApplicable { reason } => {
                vec![name.into(), "n/a".into(), "-".into(), "-".into(), reason.clone()]
            }
        });
    }
    table(&mut out, style, &format!("Significance tests (alpha = {})", report.config.alpha), header, rows);

    if let Section::Ok { result: pw } = &report.tests.pairwise {
        let header = ["Pair", "z", "raw p", "Bonferroni p", "Significant"].map(String::from).to_vec();
        let rows = pw
            .comparisons
            .iter()
            .map(|c| {
                vec![
                    format!("{} vs {}", c.group_a, c.group_b),
                    f2(c.statistic),
                    p_text(c.raw_p),
                    p_text(c.adjusted_p),
                    if c.significant { "yes".into() } else { "no".into() },
                ]
            })
            .collect();
        table(&mut out, style, &format!("Pairwise rank-sum tests (m = {})", pw.m), header, rows);
    }

    match &report.regression {
        Section::Ok { result: a } => {
            let header = ["Variable", "Mean", "SD", "Minimum", "Maximum"].map(String::from).to_vec();
            let rows =
                a.variables.iter().map(|v| vec![v.name.clone(), f2(v.mean), f2(v.sd), f2(v.min), f2(v.max)]).collect();
            table(
                &mut out,
                style,
                &format!("Model variables (n = {}, not adjusted for clustering)", a.counts.retained),
                header,
                rows,
            );

            let fit = &a.fit;
            let header = ["Variable", "Coefficient", "z statistic"].map(String::from).to_vec();
            let order: Vec<usize> = (1..fit.coefficients.len()).chain(std::iter::once(0)).collect();
            let mut rows: Vec<Vec<String>> = order
                .into_iter()
                .map(|i| {
                    let p = fit.p_values[i];
                    vec![
                        fit.column_names[i].clone(),
                        format!("{}{}", f2(fit.coefficients[i]), stars(p.is_finite().then_some(p))),
                        f2(fit.statistics[i]),
                    ]
                })
                .collect();
            rows.push(vec!["Number of publications".into(), fit.n_rows.to_string(), String::new()]);
            rows.push(vec!["Number of unique publications".into(), fit.n_unique_clusters.to_string(), String::new()]);
            table(&mut out, style, "Logistic regression, cluster-robust errors", header, rows);

            let header = ["Pair", "Contrast", "z statistic"].map(String::from).to_vec();
            let rows = a
                .margins
                .contrasts
                .iter()
                .map(|c| {
                    vec![
                        c.label.clone(),
                        format!("{}{}", f2(c.estimate), stars(c.adjusted_p)),
                        c.statistic.map_or("-".into(), f2),
                    ]
                })
                .collect();
            table(&mut out, style, "Pairwise contrasts of linear predictions (Bonferroni)", header, rows);

            let header = ["Group", "Adjusted prediction", "SE", "CI lower", "CI upper"].map(String::from).to_vec();
            let rows = a
                .margins
                .predictions
                .iter()
                .map(|p| {
                    vec![
                        p.group.clone(),
                        format!("{:.4}", p.prediction),
                        format!("{:.4}", p.se),
                        format!("{:.4}", p.lower),
                        format!("{:.4}", p.upper),
                    ]
                })
                .collect();
            table(&mut out, style, "Adjusted predictions", header, rows);
            out.push_str("* p < .05, ** p < .01, *** p < .001\n");
        }
        Section::NotApplicable { reason } => {
            let _ = writeln!(out, "{}\nskipped: {reason}", style.head("Logistic regression"));
        }
    }
    out
}
