//! Publication records, file ingestion and the missing-value policy.
//!
//! One input row describes one publication. A publication credited to several
//! groups (`UnivA;UnivB` in the group cell, or the same `pub_id` on several
//! rows) is kept once per group; every per-group statistic counts
//! (pub_id, group) pairs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};

pub const COLUMNS: [&str; 9] =
    ["pub_id", "group", "year", "doc_type", "subject", "citations", "percentile", "pages", "n_authors"];

const MANDATORY: [&str; 5] = ["pub_id", "group", "year", "doc_type", "subject"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DocType {
    Article,
    Note,
    Review,
    Other(String),
}

impl DocType {
    pub fn parse(label: &str) -> DocType {
        match label.trim().to_ascii_lowercase().as_str() {
            "article" => DocType::Article,
            "note" => DocType::Note,
            "review" => DocType::Review,
            _ => DocType::Other(label.trim().to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            DocType::Article => "article",
            DocType::Note => "note",
            DocType::Review => "review",
            DocType::Other(s) => s,
        }
    }

    /// Only articles, notes and reviews receive percentiles from the usual
    /// citation databases.
    pub fn is_percentile_eligible(&self) -> bool {
        !matches!(self, DocType::Other(_))
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for DocType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for DocType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(DocType::parse(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub groups: Vec<String>,
    pub year: i32,
    pub doc_type: DocType,
    pub subjects: Vec<String>,
    pub citations: Option<u64>,
    pub percentile: Option<f64>,
    pub pages: Option<u32>,
    pub n_authors: Option<u32>,
}

impl PublicationRecord {
    /// Checks the record-level invariants.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.pub_id.trim().is_empty() {
            return Err("empty pub_id".into());
        }
        check_labels("group", &self.groups)?;
        check_labels("subject", &self.subjects)?;
        if self.citations.is_none() && self.percentile.is_none() {
            return Err("neither citations nor percentile present".into());
        }
        if let Some(p) = self.percentile {
            if !(p.is_finite() && p > 0.0 && p <= 100.0) {
                return Err(format!("percentile {p} outside (0, 100]"));
            }
        }
        if self.pages == Some(0) {
            return Err("pages must be >= 1".into());
        }
        if self.n_authors == Some(0) {
            return Err("n_authors must be >= 1".into());
        }
        Ok(())
    }
}

fn check_labels(what: &str, labels: &[String]) -> std::result::Result<(), String> {
    if labels.is_empty() {
        return Err(format!("no {what} label"));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if l.trim().is_empty() {
            return Err(format!("empty {what} label"));
        }
        if !seen.insert(l.as_str()) {
            return Err(format!("{what} label `{l}` listed twice"));
        }
    }
    Ok(())
}

/// Validated, immutable set of publications.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    records: Vec<PublicationRecord>,
    group_index: BTreeMap<String, Vec<usize>>,
    duplicate_map: BTreeMap<String, Vec<String>>,
}

impl Corpus {
    pub fn new(records: Vec<PublicationRecord>) -> Result<Corpus> {
        let mut seen: HashSet<(String, String)> = HashSet::new();
        for r in &records {
            r.validate().map_err(|m| Error::Corpus(format!("record `{}`: {m}", r.pub_id)))?;
            for g in &r.groups {
                if !seen.insert((r.pub_id.clone(), g.clone())) {
                    return Err(Error::Corpus(format!("duplicate (pub_id, group) pair ({}, {g})", r.pub_id)));
                }
            }
        }
        Ok(Self::build_unchecked(records))
    }

    fn build_unchecked(records: Vec<PublicationRecord>) -> Corpus {
        let mut group_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_pub: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            for g in &r.groups {
                group_index.entry(g.clone()).or_default().push(i);
                by_pub.entry(r.pub_id.clone()).or_default().insert(g.clone());
            }
        }
        let duplicate_map =
            by_pub.into_iter().filter(|(_, gs)| gs.len() > 1).map(|(id, gs)| (id, gs.into_iter().collect())).collect();
        Corpus { records, group_index, duplicate_map }
    }

    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<PublicationRecord> {
        self.records
    }

    /// Group labels in sorted order.
    pub fn groups(&self) -> Vec<&str> {
        self.group_index.keys().map(String::as_str).collect()
    }

    pub fn group_index(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.group_index
    }

    /// Publications credited to more than one group.
    pub fn duplicate_map(&self) -> &BTreeMap<String, Vec<String>> {
        &self.duplicate_map
    }

    pub fn group_records<'a>(&'a self, group: &str) -> impl Iterator<Item = &'a PublicationRecord> + 'a {
        self.group_index.get(group).into_iter().flatten().map(move |&i| &self.records[i])
    }

    /// Number of (pub_id, group) pairs.
    pub fn n_pairs(&self) -> usize {
        self.group_index.values().map(Vec::len).sum()
    }

    pub fn n_unique(&self) -> usize {
        self.records.iter().map(|r| r.pub_id.as_str()).collect::<HashSet<_>>().len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Percentiles of one group, in record order. Records without a
    /// percentile are skipped.
    pub fn group_percentiles(&self, group: &str) -> Vec<f64> {
        self.group_records(group).filter_map(|r| r.percentile).collect()
    }

    pub fn group_citations(&self, group: &str) -> Option<Vec<u64>> {
        self.group_records(group).map(|r| r.citations).collect()
    }

    pub fn with_records(&self, records: Vec<PublicationRecord>) -> Corpus {
        Self::build_unchecked(records)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub format: InputFormat,
    pub delimiter: u8,
    /// Abort on the first invalid row instead of collecting diagnostics.
    pub fail_fast: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { format: InputFormat::Csv, delimiter: b',', fail_fast: false }
    }
}

/// A loaded corpus plus the rows that were rejected or merely flagged.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub corpus: Corpus,
    pub rejected: Vec<RowError>,
    pub flagged: Vec<RowError>,
}

pub fn load_path(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Loaded> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Corpus(format!("cannot read {}: {e}", path.display())))?;
    match opts.format {
        InputFormat::Csv => load_csv(file, opts),
        InputFormat::Json => load_json(file, opts),
    }
}

/// Raw text cells of one input row, keyed by canonical column.
struct RawRow {
    line: usize,
    cells: [Option<String>; 9],
}

pub fn load_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded> {
    let mut rdr =
        csv::ReaderBuilder::new().delimiter(opts.delimiter).has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut col_pos = [None; 9];
    for (i, h) in headers.iter().enumerate() {
        if let Some(c) = COLUMNS.iter().position(|&c| c == h.trim()) {
            col_pos[c] = Some(i);
        }
    }
    check_header(|name| col_pos[col(name)].is_some())?;

    let mut raw = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(n + 2);
        let mut cells: [Option<String>; 9] = Default::default();
        for (c, pos) in col_pos.iter().enumerate() {
            cells[c] = pos.and_then(|p| rec.get(p)).map(str::to_string);
        }
        raw.push(RawRow { line, cells });
    }
    finish(raw, opts)
}

pub fn load_json<R: Read>(reader: R, opts: &LoadOptions) -> Result<Loaded> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_reader(reader)?;
    check_header(|name| rows.is_empty() || rows.iter().any(|r| r.contains_key(name)))?;
    let raw = rows
        .iter()
        .enumerate()
        .map(|(i, obj)| {
            let mut cells: [Option<String>; 9] = Default::default();
            for (c, name) in COLUMNS.iter().enumerate() {
                cells[c] = obj.get(*name).map(json_cell);
            }
            RawRow { line: i + 1, cells }
        })
        .collect();
    finish(raw, opts)
}

fn json_cell(v: &serde_json::Value) -> String {
    use serde_json::Value;
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(json_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn col(name: &str) -> usize {
    COLUMNS.iter().position(|&c| c == name).expect("canonical column")
}

fn check_header(has: impl Fn(&str) -> bool) -> Result<()> {
    for name in MANDATORY {
        if !has(name) {
            return Err(Error::Corpus(format!("missing mandatory column `{name}`")));
        }
    }
    if !has("citations") && !has("percentile") {
        return Err(Error::Corpus("input needs a `citations` or a `percentile` column".into()));
    }
    Ok(())
}

fn finish(raw: Vec<RawRow>, opts: &LoadOptions) -> Result<Loaded> {
    let mut records = Vec::with_capacity(raw.len());
    let mut rejected = Vec::new();
    let mut flagged = Vec::new();
    let mut pairs: HashSet<(String, String)> = HashSet::new();
    for row in raw {
        let parsed = parse_row(&row).and_then(|r| {
            for g in &r.groups {
                if pairs.contains(&(r.pub_id.clone(), g.clone())) {
                    return Err(format!("duplicate (pub_id, group) pair ({}, {g})", r.pub_id));
                }
            }
            Ok(r)
        });
        match parsed {
            Ok(r) => {
                for g in &r.groups {
                    pairs.insert((r.pub_id.clone(), g.clone()));
                }
                if !r.doc_type.is_percentile_eligible() {
                    flagged.push(RowError {
                        row: row.line,
                        message: format!("document type `{}` normally has no percentile", r.doc_type),
                    });
                }
                records.push(r);
            }
            Err(message) => {
                let err = RowError { row: row.line, message };
                if opts.fail_fast {
                    return Err(Error::InvalidRows(vec![err]));
                }
                rejected.push(err);
            }
        }
    }
    Ok(Loaded { corpus: Corpus::build_unchecked(records), rejected, flagged })
}

fn parse_row(row: &RawRow) -> std::result::Result<PublicationRecord, String> {
    let cell =
        |name: &str| -> Option<&str> { row.cells[col(name)].as_deref().map(str::trim).filter(|s| !s.is_empty()) };
    let required = |name: &str| cell(name).ok_or_else(|| format!("`{name}` is empty"));
    let list = |name: &str| -> std::result::Result<Vec<String>, String> {
        Ok(required(name)?.split(';').map(|s| s.trim().to_string()).collect())
    };
    fn num<T: std::str::FromStr>(name: &str, v: Option<&str>) -> std::result::Result<Option<T>, String> {
        v.map(|s| s.parse::<T>().map_err(|_| format!("`{name}` value `{s}` is not valid"))).transpose()
    }

    let year: i32 = required("year")?
        .parse()
        .map_err(|_| format!("`year` value `{}` is not an integer", cell("year").unwrap_or("")))?;
    let rec = PublicationRecord {
        pub_id: required("pub_id")?.to_string(),
        groups: list("group")?,
        year,
        doc_type: DocType::parse(required("doc_type")?),
        subjects: list("subject")?,
        citations: num("citations", cell("citations"))?,
        percentile: num("percentile", cell("percentile"))?,
        pages: num("pages", cell("pages"))?,
        n_authors: num("n_authors", cell("n_authors"))?,
    };
    rec.validate()?;
    Ok(rec)
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in corpus.records() {
        w.write_record([
            r.pub_id.clone(),
            r.groups.join(";"),
            r.year.to_string(),
            r.doc_type.to_string(),
            r.subjects.join(";"),
            fmt_opt(r.citations),
            fmt_opt(r.percentile),
            fmt_opt(r.pages),
            fmt_opt(r.n_authors),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    pub_id: &'a str,
    group: &'a [String],
    year: i32,
    doc_type: &'a DocType,
    subject: &'a [String],
    citations: Option<u64>,
    percentile: Option<f64>,
    pages: Option<u32>,
    n_authors: Option<u32>,
}

pub fn write_json<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let rows: Vec<JsonRow<'_>> = corpus
        .records()
        .iter()
        .map(|r| JsonRow {
            pub_id: &r.pub_id,
            group: &r.groups,
            year: r.year,
            doc_type: &r.doc_type,
            subject: &r.subjects,
            citations: r.citations,
            percentile: r.percentile,
            pages: r.pages,
            n_authors: r.n_authors,
        })
        .collect();
    serde_json::to_writer_pretty(writer, &rows)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsetCounts {
    /// (pub_id, group) pairs before filtering.
    pub total: usize,
    /// (pub_id, group) pairs with percentile, pages and author count present.
    pub retained: usize,
    /// Distinct publications among the retained pairs.
    pub unique: usize,
}

impl SubsetCounts {
    pub fn is_empty(&self) -> bool {
        self.retained == 0
    }
}

/// Records usable in the regression model: percentile, pages and n_authors
/// all present.
pub fn regression_subset(corpus: &Corpus) -> (Corpus, SubsetCounts) {
    let kept: Vec<PublicationRecord> = corpus
        .records()
        .iter()
        .filter(|r| r.percentile.is_some() && r.pages.is_some() && r.n_authors.is_some())
        .cloned()
        .collect();
    let subset = corpus.with_records(kept);
    let counts = SubsetCounts { total: corpus.n_pairs(), retained: subset.n_pairs(), unique: subset.n_unique() };
    (subset, counts)
}

/// Group × year publication counts with margins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub groups: Vec<String>,
    pub years: Vec<i32>,
    /// `counts[g][y]` for `groups[g]`, `years[y]`.
    pub counts: Vec<Vec<usize>>,
    pub group_totals: Vec<usize>,
    pub year_totals: Vec<usize>,
    pub grand_total: usize,
}

pub fn summary_table(corpus: &Corpus) -> SummaryTable {
    let groups: Vec<String> = corpus.groups().into_iter().map(String::from).collect();
    let years: Vec<i32> = corpus.records().iter().map(|r| r.year).collect::<BTreeSet<_>>().into_iter().collect();
    let mut counts = vec![vec![0usize; years.len()]; groups.len()];
    for (gi, g) in groups.iter().enumerate() {
        for r in corpus.group_records(g) {
            let yi = years.binary_search(&r.year).expect("year collected above");
            counts[gi][yi] += 1;
        }
    }
    let group_totals: Vec<usize> = counts.iter().map(|row| row.iter().sum()).collect();
    let year_totals: Vec<usize> = (0..years.len()).map(|y| counts.iter().map(|row| row[y]).sum()).collect();
    let grand_total = group_totals.iter().sum();
    SummaryTable { groups, years, counts, group_totals, year_totals, grand_total }
}
