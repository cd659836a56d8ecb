//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use percentile_impact::{load_path, Corpus, LoadOptions, Loaded};

pub fn dataset_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic_universities.csv")
}

pub fn synthetic() -> Loaded {
    load_path(dataset_path(), &LoadOptions::default()).expect("bundled dataset loads")
}

/// The bundled corpus with percentiles removed, so they must be recomputed
/// from citation counts.
pub fn citations_only(corpus: &Corpus) -> Corpus {
    let records = corpus
        .records()
        .iter()
        .cloned()
        .map(|mut r| {
            r.percentile = None;
            r
        })
        .collect();
    corpus.with_records(records)
}
