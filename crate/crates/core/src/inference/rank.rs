use serde::Serialize;

use super::{check_alpha, Payload, TestName, TestResult};
use crate::error::{Error, Result};
use crate::special::{chi2_sf, normal_two_sided_p};
use crate::stats::midranks;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KruskalWallisDetail {
    pub n: usize,
    pub group_sizes: Vec<usize>,
    pub mean_ranks: Vec<f64>,
    /// Divisor C = 1 - sum(t^3 - t) / (N^3 - N); 1 without ties.
    pub tie_correction: f64,
    /// H before division by the tie correction.
    pub h_uncorrected: f64,
}

/// Kruskal-Wallis H-test with midranks and the standard tie correction,
/// p-value from the chi-square approximation with k - 1 degrees of freedom.
pub fn kruskal_wallis(groups: &[&[f64]], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if groups.len() < 2 {
        return Err(Error::Inference("Kruskal-Wallis needs at least two groups".into()));
    }
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(Error::Inference(format!("Kruskal-Wallis group {i} is empty")));
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = pooled.len();
    if n < 3 {
        return Err(Error::Inference("Kruskal-Wallis needs at least three observations".into()));
    }
    let (ranks, ties) = midranks(&pooled);
    let mut offset = 0;
    let mut rank_term = 0.0;
    let mut mean_ranks = Vec::with_capacity(groups.len());
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        rank_term += r * r / g.len() as f64;
        mean_ranks.push(r / g.len() as f64);
        offset += g.len();
    }
    let nf = n as f64;
    let h_uncorrected = 12.0 / (nf * (nf + 1.0)) * rank_term - 3.0 * (nf + 1.0);
    let tie_sum: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let tie_correction = 1.0 - tie_sum / (nf * nf * nf - nf);
    let df = (groups.len() - 1) as u32;
    let detail = KruskalWallisDetail {
        n,
        group_sizes: groups.iter().map(|g| g.len()).collect(),
        mean_ranks,
        tie_correction,
        h_uncorrected,
    };
    if tie_correction <= 0.0 {
        // every observation tied
        let mut res =
            TestResult::new(TestName::KruskalWallis, 0.0, Some(df), 1.0, alpha, Payload::KruskalWallis(detail));
        res.degenerate = true;
        return Ok(res);
    }
    let h = (h_uncorrected / tie_correction).max(0.0);
    Ok(TestResult::new(
        TestName::KruskalWallis,
        h,
        Some(df),
        chi2_sf(h, df as f64),
        alpha,
        Payload::KruskalWallis(detail),
    ))
}

/// Result of one two-sample rank test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    /// Normal-approximation statistic, positive when the first sample ranks higher.
    pub z: f64,
    pub p_value: f64,
    pub degenerate: bool,
}

/// Two-sample Wilcoxon-Mann-Whitney test, normal approximation with tie
/// correction and no continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Inference("rank-sum test with an empty sample".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let tie_sum: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(RankSum { u, z: 0.0, p_value: 1.0, degenerate: true });
    }
    let z = (u - n1 * n2 / 2.0) / var.sqrt();
    Ok(RankSum { u, z, p_value: normal_two_sided_p(z), degenerate: false })
}

/// Bonferroni adjustment of one raw p-value among `m` comparisons.
pub fn bonferroni(raw_p: f64, m: usize) -> f64 {
    (raw_p * m as f64).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseComparison {
    pub group_a: String,
    pub group_b: String,
    pub u: f64,
    pub statistic: f64,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseTable {
    pub comparisons: Vec<PairwiseComparison>,
    pub m: usize,
    pub adjustment: &'static str,
    pub alpha: f64,
}

impl PairwiseTable {
    /// Groups that differ significantly from `group`.
    pub fn significant_partners(&self, group: &str) -> Vec<&str> {
        self.comparisons
            .iter()
            .filter(|c| c.significant)
            .filter_map(|c| {
                if c.group_a == group {
                    Some(c.group_b.as_str())
                } else if c.group_b == group {
                    Some(c.group_a.as_str())
                } else {
                    None
                }
            })
            .collect()
    }
}

/// All k(k-1)/2 pairwise rank-sum tests with Bonferroni-adjusted p-values.
pub fn pairwise_rank_tests(groups: &[(&str, &[f64])], alpha: f64) -> Result<PairwiseTable> {
    check_alpha(alpha)?;
    if groups.len() < 2 {
        return Err(Error::Inference("pairwise comparisons need at least two groups".into()));
    }
    if let Some((label, _)) = groups.iter().find(|(_, g)| g.is_empty()) {
        return Err(Error::Inference(format!("group `{label}` is empty")));
    }
    let k = groups.len();
    let m = k * (k - 1) / 2;
    let mut comparisons = Vec::with_capacity(m);
    for i in 0..k {
        for j in i + 1..k {
            let t = mann_whitney(groups[i].1, groups[j].1)?;
            let adjusted_p = bonferroni(t.p_value, m);
            comparisons.push(PairwiseComparison {
                group_a: groups[i].0.to_string(),
                group_b: groups[j].0.to_string(),
                u: t.u,
                statistic: t.z,
                raw_p: t.p_value,
                adjusted_p,
                significant: adjusted_p < alpha,
            });
        }
    }
    Ok(PairwiseTable { comparisons, m, adjustment: "bonferroni", alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_give_zero() {
        let g = [1.0, 2.0, 3.0];
        let r = kruskal_wallis(&[&g, &g], 0.05).unwrap();
        assert!(r.statistic.abs() < 1e-12);
    }

    #[test]
    fn all_tied_is_degenerate() {
        let r = kruskal_wallis(&[&[2.0, 2.0], &[2.0, 2.0, 2.0]], 0.05).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn separated_groups_by_rank_sum_formula() {
        // rank sums 6, 15, 24: 12/90 * (36 + 225 + 576)/3 - 30 = 7.2
        let r = kruskal_wallis(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]], 0.05).unwrap();
        assert!((r.statistic - 7.2).abs() < 1e-12);
        assert_eq!(r.df, Some(2));
    }

    #[test]
    fn four_groups_have_three_df() {
        let r = kruskal_wallis(&[&[1.0, 5.0], &[2.0], &[3.0, 7.0], &[4.0]], 0.05).unwrap();
        assert_eq!(r.df, Some(3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(kruskal_wallis(&[&[1.0, 2.0]], 0.05).is_err());
        assert!(kruskal_wallis(&[&[1.0, 2.0], &[]], 0.05).is_err());
        assert!(kruskal_wallis(&[&[1.0], &[2.0]], 0.05).is_err());
    }

    #[test]
    fn bonferroni_arithmetic() {
        assert!((bonferroni(0.01, 6) - 0.06).abs() < 1e-15);
        assert_eq!(bonferroni(0.5, 6), 1.0);
    }

    #[test]
    fn pairwise_counts_and_partners() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 3.0, 4.0, 5.0];
        let c = [3.0, 4.0, 5.0, 6.0];
        let d = [30.0, 40.0, 50.0, 60.0];
        let t = pairwise_rank_tests(&[("A", &a), ("B", &b), ("C", &c), ("D", &d)], 0.5).unwrap();
        assert_eq!(t.m, 6);
        assert_eq!(t.comparisons.len(), 6);
        for c in &t.comparisons {
            assert!((c.adjusted_p - (6.0 * c.raw_p).min(1.0)).abs() < 1e-15);
        }
        assert!(t.significant_partners("D").len() >= 2);
        assert!(pairwise_rank_tests(&[("A", &a), ("E", &[])], 0.05).is_err());
    }

    #[test]
    fn mann_whitney_direction() {
        let t = mann_whitney(&[5.0, 6.0, 7.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.u, 9.0);
        assert!(t.z > 0.0);
        let t = mann_whitney(&[1.0, 1.0], &[1.0]).unwrap();
        assert!(t.degenerate);
    }
}
