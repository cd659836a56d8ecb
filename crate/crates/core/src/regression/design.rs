use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::classes::{classify, ClassScheme};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Dummy coding of the group factor: every label but the reference gets an
/// indicator column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCoding {
    /// All group labels in sorted order, reference included.
    pub labels: Vec<String>,
    pub reference: String,
    /// Design column of each label's indicator; `None` for the reference.
    pub columns: Vec<Option<usize>>,
}

impl GroupCoding {
    /// Coding with indicator columns starting at `first_column`, in label
    /// order, skipping the reference.
    pub fn new(mut labels: Vec<String>, reference: Option<&str>, first_column: usize) -> Result<GroupCoding> {
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::Regression("no groups to code".into()));
        }
        let reference = match reference {
            Some(r) if labels.iter().any(|l| l == r) => r.to_string(),
            Some(r) => return Err(Error::Regression(format!("unknown reference group `{r}`"))),
            None => labels[0].clone(),
        };
        let mut next = first_column;
        let columns = labels
            .iter()
            .map(|l| {
                if *l == reference {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        Ok(GroupCoding { labels, reference, columns })
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::Regression(format!("unknown group `{label}`")))
    }

    pub fn n_dummies(&self) -> usize {
        self.labels.len() - 1
    }

    /// Indicator columns of the non-reference groups.
    pub fn dummy_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().flatten().copied()
    }
}

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Dense cluster index per row.
    pub clusters: Vec<usize>,
    /// Cluster label per dense index.
    pub cluster_ids: Vec<String>,
    pub column_names: Vec<String>,
    pub coding: GroupCoding,
}

impl DesignMatrix {
    pub fn from_parts(
        x: DMatrix<f64>,
        y: DVector<f64>,
        row_clusters: &[String],
        column_names: Vec<String>,
        coding: GroupCoding,
    ) -> Result<DesignMatrix> {
        if x.nrows() != y.len() || x.nrows() != row_clusters.len() {
            return Err(Error::Regression("design, outcome and cluster lengths differ".into()));
        }
        if x.ncols() != column_names.len() {
            return Err(Error::Regression("column names do not match the design".into()));
        }
        if y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Regression("outcome must be 0/1".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Regression("design contains non-finite values".into()));
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut cluster_ids = Vec::new();
        let clusters = row_clusters
            .iter()
            .map(|c| {
                *index.entry(c.as_str()).or_insert_with(|| {
                    cluster_ids.push(c.clone());
                    cluster_ids.len() - 1
                })
            })
            .collect();
        Ok(DesignMatrix { x, y, clusters, cluster_ids, column_names, coding })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_clusters(&self) -> usize {
        self.cluster_ids.len()
    }

    /// Copy of the design with every row's group indicators set to `label`.
    pub fn with_group(&self, label: &str) -> Result<DMatrix<f64>> {
        let gi = self.coding.index_of(label)?;
        let mut x = self.x.clone();
        for c in self.coding.dummy_columns() {
            x.column_mut(c).fill(0.0);
        }
        if let Some(c) = self.coding.columns[gi] {
            x.column_mut(c).fill(1.0);
        }
        Ok(x)
    }
}

pub const INTERCEPT: &str = "constant";
pub const PAGES: &str = "pages";
pub const AUTHORS: &str = "n_authors";

/// Rows: one per (publication, group) pair of a regression-ready corpus.
/// Columns: intercept, group indicators, pages, author count. Outcome: 1 for
/// the PR(2) `10%` class. Cluster: pub_id.
pub fn build_design(corpus: &Corpus, reference: Option<&str>) -> Result<DesignMatrix> {
    let labels: Vec<String> = corpus.groups().into_iter().map(String::from).collect();
    let coding = GroupCoding::new(labels, reference, 1)?;
    let k = coding.n_dummies();
    let ncols = 3 + k;
    let mut column_names = vec![INTERCEPT.to_string()];
    for (l, c) in coding.labels.iter().zip(&coding.columns) {
        if c.is_some() {
            column_names.push(l.clone());
        }
    }
    column_names.push(PAGES.into());
    column_names.push(AUTHORS.into());

    let pr2 = ClassScheme::pr2();
    let mut data = Vec::new();
    let mut y = Vec::new();
    let mut clusters = Vec::new();
    for (gi, label) in coding.labels.iter().enumerate() {
        for r in corpus.group_records(label) {
            let (Some(p), Some(pages), Some(authors)) = (r.percentile, r.pages, r.n_authors) else {
                return Err(Error::Regression(format!(
                    "record `{}` has missing covariates; build the design from the regression subset",
                    r.pub_id
                )));
            };
            let mut row = vec![0.0; ncols];
            row[0] = 1.0;
            if let Some(c) = coding.columns[gi] {
                row[c] = 1.0;
            }
            row[ncols - 2] = pages as f64;
            row[ncols - 1] = authors as f64;
            data.extend(row);
            y.push(if classify(p, &pr2)? == pr2.best() { 1.0 } else { 0.0 });
            clusters.push(r.pub_id.clone());
        }
    }
    let x = DMatrix::from_row_slice(y.len(), ncols, &data);
    DesignMatrix::from_parts(x, DVector::from_vec(y), &clusters, column_names, coding)
}
