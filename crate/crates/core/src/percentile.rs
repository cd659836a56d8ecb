//! Percentile assignment from reference sets of raw citation counts.
//!
//! Orientation: smaller is better. A percentile of 10 means the paper is
//! among the 10% most cited papers of its reference set; 100 means uncited.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocType, PublicationRecord};
use crate::error::{Error, Result};

/// Reference sets smaller than this trigger a warning.
pub const SMALL_REFSET_WARNING: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RefSetKey {
    pub subject: String,
    pub year: i32,
    pub doc_type: DocType,
}

impl std::fmt::Display for RefSetKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.subject, self.year, self.doc_type)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    pub key: RefSetKey,
    /// Citation counts, ascending.
    counts: Vec<u64>,
}

impl ReferenceSet {
    pub fn new(key: RefSetKey, mut counts: Vec<u64>) -> Result<ReferenceSet> {
        if counts.is_empty() {
            return Err(Error::Percentile(format!("reference set {key} is empty")));
        }
        counts.sort_unstable();
        Ok(ReferenceSet { key, counts })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn n_below(&self, citations: u64) -> usize {
        self.counts.partition_point(|&c| c < citations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentileScheme {
    /// 100 * |{c >= query}| / N.
    #[default]
    IncitesGe,
    /// 100 * (1 - |{c < query}| / N), the "papers below me" rank read in
    /// smaller-is-better orientation.
    ComplementExclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileAssignment {
    pub pub_id: String,
    pub percentile: f64,
    pub refset_key: RefSetKey,
    pub refset_size: usize,
    pub scheme: PercentileScheme,
}

/// One reference set per (subject, year, doc_type) occurring among records
/// with citation counts. A publication listed under several groups counts
/// once per set; one with k subjects joins k sets.
pub fn build_reference_sets(corpus: &Corpus) -> Result<BTreeMap<RefSetKey, ReferenceSet>> {
    if corpus.is_empty() {
        return Ok(BTreeMap::new());
    }
    let mut members: BTreeMap<RefSetKey, Vec<u64>> = BTreeMap::new();
    let mut seen: HashSet<(&str, RefSetKey)> = HashSet::new();
    for r in corpus.records() {
        let Some(c) = r.citations else { continue };
        for key in keys_of(r) {
            if seen.insert((r.pub_id.as_str(), key.clone())) {
                members.entry(key).or_default().push(c);
            }
        }
    }
    if members.is_empty() {
        return Err(Error::Percentile("corpus carries no citation counts".into()));
    }
    members.into_iter().map(|(k, counts)| Ok((k.clone(), ReferenceSet::new(k, counts)?))).collect()
}

fn keys_of(r: &PublicationRecord) -> impl Iterator<Item = RefSetKey> + '_ {
    r.subjects.iter().map(move |s| RefSetKey { subject: s.clone(), year: r.year, doc_type: r.doc_type.clone() })
}

/// Percentile of a publication with `citations` within `refset`, of which the
/// publication is itself a member.
pub fn assign_percentile(citations: u64, refset: &ReferenceSet, scheme: PercentileScheme) -> Result<f64> {
    let n = refset.len();
    if n == 0 {
        return Err(Error::Percentile("empty reference set".into()));
    }
    let below = refset.n_below(citations);
    if below == n {
        return Err(Error::Percentile(format!("{citations} citations exceed every member of {}", refset.key)));
    }
    let n = n as f64;
    Ok(match scheme {
        PercentileScheme::IncitesGe => 100.0 * (refset.len() - below) as f64 / n,
        // 1 - below/N, evaluated as (N - below)/N to stay exact on the grid
        PercentileScheme::ComplementExclusive => 100.0 * (n - below as f64) / n,
    })
}

/// The minimum percentile over a publication's subjects. Ties go to the
/// lexicographically smallest subject label.
pub fn best_subject_percentile(
    record: &PublicationRecord,
    per_subject: &[PercentileAssignment],
) -> Result<PercentileAssignment> {
    per_subject
        .iter()
        .filter(|a| a.pub_id == record.pub_id)
        .min_by(|a, b| {
            a.percentile.total_cmp(&b.percentile).then_with(|| a.refset_key.subject.cmp(&b.refset_key.subject))
        })
        .cloned()
        .ok_or_else(|| Error::Percentile(format!("no subject percentile for `{}`", record.pub_id)))
}

/// Percentile assignments for every record carrying a citation count.
#[derive(Debug, Clone, Default)]
pub struct AssignmentRun {
    pub assignments: Vec<PercentileAssignment>,
    pub warnings: Vec<String>,
}

pub fn assign_corpus(corpus: &Corpus, scheme: PercentileScheme) -> Result<AssignmentRun> {
    let sets = build_reference_sets(corpus)?;
    let mut run = AssignmentRun::default();
    for set in sets.values().filter(|s| s.len() < SMALL_REFSET_WARNING) {
        run.warnings.push(format!("reference set {} has only {} members", set.key, set.len()));
    }
    let mut done: HashSet<&str> = HashSet::new();
    for r in corpus.records() {
        let Some(c) = r.citations else { continue };
        if !done.insert(r.pub_id.as_str()) {
            continue;
        }
        let per_subject = keys_of(r)
            .map(|key| {
                let set = &sets[&key];
                Ok(PercentileAssignment {
                    pub_id: r.pub_id.clone(),
                    percentile: assign_percentile(c, set, scheme)?,
                    refset_size: set.len(),
                    refset_key: key,
                    scheme,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        run.assignments.push(best_subject_percentile(r, &per_subject)?);
    }
    Ok(run)
}

/// Fills in missing percentiles from citation counts; records that already
/// carry a percentile are left untouched.
pub fn fill_missing_percentiles(corpus: &Corpus, scheme: PercentileScheme) -> Result<(Corpus, AssignmentRun)> {
    if corpus.records().iter().all(|r| r.percentile.is_some()) {
        return Ok((corpus.clone(), AssignmentRun::default()));
    }
    let run = assign_corpus(corpus, scheme)?;
    let by_id: BTreeMap<&str, f64> = run.assignments.iter().map(|a| (a.pub_id.as_str(), a.percentile)).collect();
    let records = corpus
        .records()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if r.percentile.is_none() {
                r.percentile = by_id.get(r.pub_id.as_str()).copied();
            }
            r
        })
        .collect();
    Ok((corpus.with_records(records), run))
}
