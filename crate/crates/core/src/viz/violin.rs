use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

pub const LOWER: f64 = 0.0;
pub const UPPER: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    /// h = 0.9 min(sd, IQR / 1.34) n^(-1/5).
    #[default]
    Silverman,
    Fixed(f64),
}

pub fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let sd = stats::sample_sd(sorted).unwrap_or(0.0);
    let iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
    let mut spread = sd.min(iqr / 1.34);
    if spread <= 0.0 {
        spread = sd;
    }
    0.9 * spread * n.powf(-0.2)
}

fn gaussian(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Gaussian kernel density on `grid`, reflected at 0 and 100 so the mass
/// stays inside the percentile range.
pub fn kde_reflected(sample: &[f64], h: f64, grid: &[f64]) -> Vec<f64> {
    let norm = 1.0 / (sample.len() as f64 * h);
    grid.iter()
        .map(|&x| {
            sample
                .iter()
                .map(|&xi| {
                    gaussian((x - xi) / h)
                        + gaussian((x - (2.0 * LOWER - xi)) / h)
                        + gaussian((x - (2.0 * UPPER - xi)) / h)
                })
                .sum::<f64>()
                * norm
        })
        .collect()
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinGroup {
    pub group: String,
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub lower_adjacent: f64,
    pub upper_adjacent: f64,
    pub bandwidth: Option<f64>,
    /// (grid point, density) pairs; empty for a point mass.
    pub density: Vec<[f64; 2]>,
    /// Set instead of a density when the group has fewer than two distinct values.
    pub point_mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinSpec {
    pub violin: Vec<ViolinGroup>,
    pub y_range: [f64; 2],
}

pub fn violin(groups: &[(&str, &[f64])], bandwidth: Bandwidth, grid_points: usize) -> Result<ViolinSpec> {
    if grid_points < 2 {
        return Err(Error::Viz("density grid needs at least two points".into()));
    }
    let step = (UPPER - LOWER) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| LOWER + i as f64 * step).collect();
    let mut out = Vec::with_capacity(groups.len());
    for (label, values) in groups {
        if values.is_empty() {
            return Err(Error::Viz(format!("violin for empty group `{label}`")));
        }
        let sorted = stats::sorted(values);
        let f = stats::five_number(&sorted);
        let distinct = sorted.windows(2).any(|w| w[0] != w[1]);
        let (bw, density, point_mass) = if distinct {
            let h = match bandwidth {
                Bandwidth::Silverman => silverman_bandwidth(&sorted),
                Bandwidth::Fixed(h) if h > 0.0 => h,
                Bandwidth::Fixed(h) => return Err(Error::Viz(format!("bandwidth {h} must be positive"))),
            };
            let d = kde_reflected(&sorted, h, &grid);
            (Some(h), grid.iter().zip(d).map(|(&x, y)| [x, y]).collect(), None)
        } else {
            (None, Vec::new(), Some(sorted[0]))
        };
        out.push(ViolinGroup {
            group: label.to_string(),
            n: sorted.len(),
            median: f.median,
            q1: f.q1,
            q3: f.q3,
            lower_adjacent: f.lower_adjacent,
            upper_adjacent: f.upper_adjacent,
            bandwidth: bw,
            density,
            point_mass,
        });
    }
    Ok(ViolinSpec { violin: out, y_range: [LOWER, UPPER] })
}
