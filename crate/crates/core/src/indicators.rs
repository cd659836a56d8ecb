//! Single-number indicators per group: I3, the top-10% share with its
//! confidence interval, percentile summary statistics and the h-index.

use serde::{Deserialize, Serialize};

use crate::classes::{distribution, ClassScheme, RankClassDistribution, SchemeName};
use crate::error::{Error, Result};
use crate::special::normal_quantile;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct I3 {
    pub i3: f64,
    /// Value if every publication sat in the best class.
    pub i3_max: f64,
    pub pct_of_max: f64,
}

/// I3 = sum_i x_i f(x_i) with class weights 1 (`<50%`) through 6 (`1%`).
pub fn i3(dist: &RankClassDistribution) -> Result<I3> {
    if dist.scheme != SchemeName::PR6 {
        return Err(Error::Indicators(format!("I3 needs a PR6 distribution, got {:?}", dist.scheme)));
    }
    let i3: f64 = dist.counts.iter().enumerate().map(|(i, &f)| (i + 1) as f64 * f as f64).sum();
    let i3_max = dist.counts.len() as f64 * dist.n() as f64;
    let pct_of_max = if i3_max > 0.0 { i3 / i3_max } else { 0.0 };
    Ok(I3 { i3, i3_max, pct_of_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    #[default]
    Wilson,
    Wald,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShareCi {
    pub count: usize,
    pub n: usize,
    pub share: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: CiMethod,
    /// Set when a Wald interval had to be clipped to [0, 1].
    pub clipped: bool,
}

pub fn proportion_ci(count: usize, n: usize, level: f64, method: CiMethod) -> Result<ShareCi> {
    if n == 0 {
        return Err(Error::Indicators("proportion of an empty group".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Indicators(format!("confidence level {level} outside (0, 1)")));
    }
    let z = normal_quantile(0.5 + level / 2.0);
    let nf = n as f64;
    let p = count as f64 / nf;
    let (lower, upper, clipped) = match method {
        CiMethod::Wilson => {
            let z2 = z * z;
            let denom = 1.0 + z2 / nf;
            let center = (p + z2 / (2.0 * nf)) / denom;
            let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
            let lower = if count == 0 { 0.0 } else { (center - half).max(0.0) };
            let upper = if count == n { 1.0 } else { (center + half).min(1.0) };
            (lower, upper, false)
        }
        CiMethod::Wald => {
            let half = z * (p * (1.0 - p) / nf).sqrt();
            let (lo, hi) = (p - half, p + half);
            (lo.max(0.0), hi.min(1.0), lo < 0.0 || hi > 1.0)
        }
    };
    Ok(ShareCi { count, n, share: p, lower, upper, level, method, clipped })
}

/// Share of the PR(2) `10%` class with a confidence interval.
pub fn top10_share(dist: &RankClassDistribution, level: f64, method: CiMethod) -> Result<ShareCi> {
    if dist.scheme != SchemeName::PR2 {
        return Err(Error::Indicators(format!("top-10% share needs a PR2 distribution, got {:?}", dist.scheme)));
    }
    proportion_ci(dist.counts[1], dist.n(), level, method)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single observation.
    pub sd: f64,
    pub sd_degenerate: bool,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

pub fn summary_stats(percentiles: &[f64]) -> Result<SummaryStats> {
    if percentiles.is_empty() {
        return Err(Error::Indicators("summary of an empty group".into()));
    }
    let sorted = stats::sorted(percentiles);
    let sd = stats::sample_sd(percentiles);
    Ok(SummaryStats {
        n: sorted.len(),
        mean: stats::mean(percentiles),
        sd: sd.unwrap_or(0.0),
        sd_degenerate: sd.is_none(),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median: stats::median_sorted(&sorted),
    })
}

/// Largest h such that h publications have at least h citations each.
pub fn h_index(citations: &[u64]) -> u64 {
    let mut sorted = citations.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|&(i, &c)| c >= (i + 1) as u64).count() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorReport {
    pub group: String,
    pub n: usize,
    pub i3: f64,
    pub i3_max: f64,
    pub i3_pct_of_max: f64,
    pub top10: ShareCi,
    pub summary: SummaryStats,
    pub h_index: Option<u64>,
    pub pr6: RankClassDistribution,
    pub pr2: RankClassDistribution,
}

pub fn indicator_report(
    group: &str,
    percentiles: &[f64],
    citations: Option<&[u64]>,
    level: f64,
    method: CiMethod,
) -> Result<IndicatorReport> {
    let pr6 = distribution(group, percentiles, &ClassScheme::pr6())?;
    let pr2 = distribution(group, percentiles, &ClassScheme::pr2())?;
    let i3v = i3(&pr6)?;
    Ok(IndicatorReport {
        group: group.to_string(),
        n: percentiles.len(),
        i3: i3v.i3,
        i3_max: i3v.i3_max,
        i3_pct_of_max: i3v.pct_of_max,
        top10: top10_share(&pr2, level, method)?,
        summary: summary_stats(percentiles)?,
        h_index: citations.map(h_index),
        pr6,
        pr2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr6_counts(counts: [usize; 6]) -> RankClassDistribution {
        let n: usize = counts.iter().sum();
        RankClassDistribution {
            group: "G".into(),
            scheme: SchemeName::PR6,
            labels: ClassScheme::pr6().labels().into_iter().map(String::from).collect(),
            counts: counts.to_vec(),
            shares: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        }
    }

    #[test]
    fn i3_weighted_sum() {
        let r = i3(&pr6_counts([10; 6])).unwrap();
        assert_eq!(r.i3, 210.0);
        assert_eq!(r.i3_max, 360.0);
        assert!((r.pct_of_max - 210.0 / 360.0).abs() < 1e-15);
        let r = i3(&pr6_counts([0, 0, 0, 0, 0, 7])).unwrap();
        assert_eq!((r.i3, r.pct_of_max), (42.0, 1.0));
    }

    #[test]
    fn i3_rejects_pr2() {
        let d = distribution("G", &[5.0], &ClassScheme::pr2()).unwrap();
        assert!(i3(&d).is_err());
    }

    #[test]
    fn i3_improves_by_class_distance() {
        let base = i3(&pr6_counts([5, 5, 5, 5, 5, 5])).unwrap().i3;
        let moved = i3(&pr6_counts([4, 5, 5, 5, 6, 5])).unwrap().i3;
        assert_eq!(moved - base, 4.0);
    }

    /// Wilson bounds as the roots of (p - pi)^2 = z^2 pi (1 - pi) / n.
    fn wilson_oracle(k: f64, n: f64, z: f64) -> (f64, f64) {
        let p = k / n;
        let a = 1.0 + z * z / n;
        let b = -(2.0 * p + z * z / n);
        let c = p * p;
        let disc = (b * b - 4.0 * a * c).sqrt();
        ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
    }

    #[test]
    fn wilson_three_of_twenty() {
        let ci = proportion_ci(3, 20, 0.95, CiMethod::Wilson).unwrap();
        assert_eq!(ci.share, 0.15);
        let (lo, hi) = wilson_oracle(3.0, 20.0, 1.959_963_984_540_054);
        assert!((ci.lower - lo).abs() < 1e-12 && (ci.upper - hi).abs() < 1e-12);
        assert!((ci.lower - 0.052).abs() < 5e-4 && (ci.upper - 0.360).abs() < 5e-4);
    }

    #[test]
    fn wald_clipping_is_flagged() {
        let ci = proportion_ci(1, 20, 0.95, CiMethod::Wald).unwrap();
        assert!(ci.clipped && ci.lower == 0.0);
        let ci = proportion_ci(0, 20, 0.95, CiMethod::Wilson).unwrap();
        assert!(ci.lower == 0.0 && ci.upper > 0.0 && !ci.clipped);
        assert!(proportion_ci(0, 0, 0.95, CiMethod::Wilson).is_err());
    }

    #[test]
    fn top10_all_uncited() {
        let d = distribution("G", &[100.0; 8], &ClassScheme::pr2()).unwrap();
        assert_eq!(top10_share(&d, 0.95, CiMethod::Wilson).unwrap().share, 0.0);
    }

    #[test]
    fn summary_examples() {
        let s = summary_stats(&[10.0, 20.0, 30.0, 100.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (40.0, 25.0, 10.0, 100.0));
        let s = summary_stats(&[42.0]).unwrap();
        assert!(s.sd_degenerate);
        assert_eq!((s.sd, s.median, s.min, s.max), (0.0, 42.0, 42.0, 42.0));
        assert!(summary_stats(&[]).is_err());
    }

    fn h_brute(c: &[u64]) -> u64 {
        (0..=c.len() as u64).filter(|&h| c.iter().filter(|&&x| x >= h).count() as u64 >= h).max().unwrap()
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(h_index(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(h_brute(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(h_index(&[0, 0, 0]), 0);
        assert_eq!(h_index(&[1]), 1);
        assert_eq!(h_index(&[]), 0);
        for seed in 0..200u64 {
            let c: Vec<u64> = (0..(seed % 17)).map(|i| (i * 31 + seed * 7) % 13).collect();
            assert_eq!(h_index(&c), h_brute(&c));
        }
    }

    #[test]
    fn duplication_keeps_shares() {
        let ps = [3.0, 8.0, 40.0, 60.0, 99.0, 100.0, 0.5];
        let doubled: Vec<f64> = ps.iter().chain(ps.iter()).copied().collect();
        let a = indicator_report("G", &ps, None, 0.95, CiMethod::Wilson).unwrap();
        let b = indicator_report("G", &doubled, None, 0.95, CiMethod::Wilson).unwrap();
        assert!((a.i3_pct_of_max - b.i3_pct_of_max).abs() < 1e-15);
        assert!((a.top10.share - b.top10.share).abs() < 1e-15);
    }
}
