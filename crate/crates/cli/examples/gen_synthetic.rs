//! Writes the bundled synthetic dataset: four universities, 2005-2009,
//! about 5,000 (publication, university) pairs.
//!
//! Citation counts are drawn from a gamma-Poisson mixture per subject, year
//! and document type; each publication's percentile is taken against a
//! simulated world reference set of the same cell, so the percentile column
//! is consistent with the citation column but not recomputable from the
//! corpus alone.
//!
//! Usage: cargo run -p percentile-impact-cli --example gen_synthetic -- [out.csv]

use std::collections::BTreeMap;
use std::fs::File;

use percentile_impact::corpus::write_csv;
use percentile_impact::percentile::RefSetKey;
use percentile_impact::{assign_percentile, Corpus, DocType, PercentileScheme, PublicationRecord, ReferenceSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

const SEED: u64 = 20_100_913;
const YEARS: std::ops::RangeInclusive<i32> = 2005..=2009;
const WORLD_SIZE: usize = 600;
const SUBJECTS: [(&str, f64); 8] = [
    ("Biochemistry", 14.0),
    ("Chemistry", 10.0),
    ("Computer Science", 5.0),
    ("Economics", 4.0),
    ("Materials Science", 8.0),
    ("Mathematics", 3.0),
    ("Neurosciences", 16.0),
    ("Physics", 9.0),
];
/// (label, papers per year, citation multiplier)
const UNIVERSITIES: [(&str, usize, f64); 4] =
    [("Univ 1", 320, 1.0), ("Univ 2", 305, 1.05), ("Univ 3", 125, 1.6), ("Univ 4", 215, 1.0)];
const SHAPE: f64 = 0.9;

fn doc_type(rng: &mut ChaCha8Rng) -> DocType {
    match rng.random_range(0..100) {
        0..88 => DocType::Article,
        88..95 => DocType::Review,
        _ => DocType::Note,
    }
}

fn type_factor(t: &DocType) -> f64 {
    match t {
        DocType::Review => 2.5,
        DocType::Note => 0.4,
        _ => 1.0,
    }
}

/// Expected citations of a cell, older papers having had longer to be cited.
fn cell_mean(subject_mean: f64, year: i32, t: &DocType) -> f64 {
    subject_mean * type_factor(t) * (2011 - year) as f64 / 4.0
}

fn draw_citations(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    let lambda = Gamma::new(SHAPE, mean / SHAPE).unwrap().sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).unwrap().sample(rng) as u64
}

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data/synthetic_universities.csv".into());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut world: BTreeMap<RefSetKey, Vec<u64>> = BTreeMap::new();
    for (subject, mean) in SUBJECTS {
        for year in YEARS {
            for t in [DocType::Article, DocType::Review, DocType::Note] {
                let m = cell_mean(mean, year, &t);
                let counts = (0..WORLD_SIZE).map(|_| draw_citations(&mut rng, m)).collect();
                world.insert(RefSetKey { subject: subject.into(), year, doc_type: t }, counts);
            }
        }
    }

    let mut records = Vec::new();
    let mut next_id = 1;
    for year in YEARS {
        for (ui, &(univ, per_year, boost)) in UNIVERSITIES.iter().enumerate() {
            for _ in 0..per_year {
                let t = doc_type(&mut rng);
                let first = rng.random_range(0..SUBJECTS.len());
                let mut subjects = vec![first];
                if rng.random_bool(0.3) {
                    let second = rng.random_range(0..SUBJECTS.len());
                    if second != first {
                        subjects.push(second);
                    }
                }
                let mut groups = vec![univ.to_string()];
                if rng.random_bool(0.04) {
                    let other = (ui + rng.random_range(1..UNIVERSITIES.len())) % UNIVERSITIES.len();
                    groups.push(UNIVERSITIES[other].0.to_string());
                    groups.sort();
                }
                let n_authors = 1 + (rng.random::<f64>().powi(2) * 14.0) as u32;
                let pages = match t {
                    DocType::Note => rng.random_range(1..5),
                    DocType::Review => rng.random_range(10..40),
                    _ => rng.random_range(4..20),
                };
                let subject_mean = subjects.iter().map(|&s| SUBJECTS[s].1).sum::<f64>() / subjects.len() as f64;
                let effort = 1.0 + 0.08 * n_authors as f64 + 0.01 * pages as f64;
                let citations = draw_citations(&mut rng, cell_mean(subject_mean, year, &t) * boost * effort * 0.6);

                let percentile = subjects
                    .iter()
                    .map(|&s| {
                        let key = RefSetKey { subject: SUBJECTS[s].0.into(), year, doc_type: t.clone() };
                        let mut counts = world[&key].clone();
                        counts.push(citations);
                        let set = ReferenceSet::new(key, counts).unwrap();
                        assign_percentile(citations, &set, PercentileScheme::IncitesGe).unwrap()
                    })
                    .fold(f64::INFINITY, f64::min);
                let percentile = (percentile * 100.0).round() / 100.0;

                let missing = rng.random::<f64>();
                records.push(PublicationRecord {
                    pub_id: format!("SYN{next_id:05}"),
                    groups,
                    year,
                    doc_type: t,
                    subjects: subjects.iter().map(|&s| SUBJECTS[s].0.to_string()).collect(),
                    citations: Some(citations),
                    percentile: Some(percentile.max(0.01)),
                    pages: (missing >= 0.08).then_some(pages),
                    n_authors: (!(0.04..0.12).contains(&missing)).then_some(n_authors),
                });
                next_id += 1;
            }
        }
    }

    let corpus = Corpus::new(records).expect("generated records are valid");
    let file = File::create(&out).expect("cannot create output file");
    write_csv(&corpus, file).expect("write failed");
    eprintln!("wrote {} records ({} pairs) to {out}", corpus.n_unique(), corpus.n_pairs());
}
