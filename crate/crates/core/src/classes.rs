//! Percentile rank classes: the six-class PR(6) and two-class PR(2) schemes.
//!
//! Each class covers a percentile interval (lower, upper]; classes are listed
//! from worst to best, so a class's position + 1 is its weight in I3.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SchemeName {
    PR6,
    PR2,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankClass {
    pub label: String,
    /// Exclusive lower percentile bound.
    pub lower: f64,
    /// Inclusive upper percentile bound.
    pub upper: f64,
    pub expected_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScheme {
    pub name: SchemeName,
    pub classes: Vec<RankClass>,
}

fn class(label: &str, lower: f64, upper: f64, expected_share: f64) -> RankClass {
    RankClass { label: label.into(), lower, upper, expected_share }
}

impl ClassScheme {
    pub fn pr6() -> ClassScheme {
        ClassScheme {
            name: SchemeName::PR6,
            classes: vec![
                class("<50%", 50.0, 100.0, 0.50),
                class("50%", 25.0, 50.0, 0.25),
                class("25%", 10.0, 25.0, 0.15),
                class("10%", 5.0, 10.0, 0.05),
                class("5%", 1.0, 5.0, 0.04),
                class("1%", 0.0, 1.0, 0.01),
            ],
        }
    }

    pub fn pr2() -> ClassScheme {
        ClassScheme {
            name: SchemeName::PR2,
            classes: vec![class("<90%", 10.0, 100.0, 0.90), class("10%", 0.0, 10.0, 0.10)],
        }
    }

    /// A user-defined scheme; intervals must tile (0, 100] from worst to
    /// best and the expected shares must sum to one.
    pub fn custom(classes: Vec<RankClass>) -> Result<ClassScheme> {
        if classes.is_empty() {
            return Err(Error::Classes("scheme has no classes".into()));
        }
        let mut upper = 100.0;
        for c in &classes {
            if c.upper != upper || c.lower >= c.upper {
                return Err(Error::Classes(format!("class `{}` breaks the partition of (0, 100]", c.label)));
            }
            upper = c.lower;
        }
        if upper != 0.0 {
            return Err(Error::Classes("classes do not reach 0".into()));
        }
        let total: f64 = classes.iter().map(|c| c.expected_share).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Classes(format!("expected shares sum to {total}, not 1")));
        }
        Ok(ClassScheme { name: SchemeName::Custom, classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn expected_shares(&self) -> Vec<f64> {
        self.classes.iter().map(|c| c.expected_share).collect()
    }

    /// Index of the best class (PR(2) `10%`, PR(6) `1%`).
    pub fn best(&self) -> usize {
        self.classes.len() - 1
    }
}

/// Index of the class containing `percentile`.
pub fn classify(percentile: f64, scheme: &ClassScheme) -> Result<usize> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::Classes(format!("percentile {percentile} outside (0, 100]")));
    }
    scheme
        .classes
        .iter()
        .position(|c| percentile > c.lower && percentile <= c.upper)
        .ok_or_else(|| Error::Classes(format!("no class contains {percentile}")))
}

pub fn classify_label(percentile: f64, scheme: &ClassScheme) -> Result<&str> {
    classify(percentile, scheme).map(|i| scheme.classes[i].label.as_str())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankClassDistribution {
    pub group: String,
    pub scheme: SchemeName,
    pub labels: Vec<String>,
    pub counts: Vec<usize>,
    pub shares: Vec<f64>,
}

impl RankClassDistribution {
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn distribution(group: &str, percentiles: &[f64], scheme: &ClassScheme) -> Result<RankClassDistribution> {
    if percentiles.is_empty() {
        return Err(Error::Classes(format!("group `{group}` has no percentiles")));
    }
    let mut counts = vec![0usize; scheme.len()];
    for &p in percentiles {
        counts[classify(p, scheme)?] += 1;
    }
    let n = percentiles.len() as f64;
    let shares = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(RankClassDistribution {
        group: group.to_string(),
        scheme: scheme.name,
        labels: scheme.labels().into_iter().map(String::from).collect(),
        counts,
        shares,
    })
}
