//! D'Agostino-Pearson omnibus K^2 test built from the transformed sample
//! skewness and kurtosis.

use serde::Serialize;

use super::{check_alpha, Payload, TestName, TestResult};
use crate::error::{Error, Result};
use crate::special::chi2_sf;

pub const MIN_SAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityDetail {
    pub n: usize,
    /// Moment skewness g1 = m3 / m2^(3/2).
    pub skewness: f64,
    /// Moment kurtosis b2 = m4 / m2^2 (3 under normality).
    pub kurtosis: f64,
    pub z_skewness: f64,
    pub z_kurtosis: f64,
}

fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

pub fn sample_skewness(xs: &[f64]) -> f64 {
    let (m2, m3, _) = central_moments(xs);
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

fn skewness_z(g1: f64, n: f64) -> f64 {
    let y = g1 * ((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let beta2 =
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    let r = y / alpha;
    delta * (r + (r * r + 1.0).sqrt()).ln()
}

fn kurtosis_z(b2: f64, n: f64) -> f64 {
    let mean = 3.0 * (n - 1.0) / (n + 1.0);
    let var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    let x = (b2 - mean) / var.sqrt();
    let sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * (6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    let term2 = ((1.0 - 2.0 / a) / denom).cbrt();
    (term1 - term2) / (2.0 / (9.0 * a)).sqrt()
}

pub fn normality_test(sample: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let n = sample.len();
    if n < MIN_SAMPLE {
        return Err(Error::Inference(format!(
            "skewness-kurtosis test needs at least {MIN_SAMPLE} observations, got {n}"
        )));
    }
    let (m2, m3, m4) = central_moments(sample);
    if m2 == 0.0 {
        return Err(Error::Inference("normality test on a constant sample".into()));
    }
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let nf = n as f64;
    let z_skewness = skewness_z(skewness, nf);
    let z_kurtosis = kurtosis_z(kurtosis, nf);
    let k2 = z_skewness * z_skewness + z_kurtosis * z_kurtosis;
    let detail = NormalityDetail { n, skewness, kurtosis, z_skewness, z_kurtosis };
    Ok(TestResult::new(TestName::Normality, k2, Some(2), chi2_sf(k2, 2.0), alpha, Payload::Normality(detail)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_sample_has_zero_skewness() {
        assert_eq!(sample_skewness(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0.0);
    }

    #[test]
    fn too_small_sample() {
        let err = normality_test(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.001).unwrap_err();
        assert!(err.to_string().contains("at least 8"));
    }

    #[test]
    fn constant_sample() {
        assert!(normality_test(&[3.0; 20], 0.001).is_err());
    }

    #[test]
    fn uniform_percentiles_reject_normality() {
        let xs: Vec<f64> = (1..=1000).map(|i| (i % 100 + 1) as f64).collect();
        let r = normality_test(&xs, 0.001).unwrap();
        assert!(r.significant, "{r:?}");
    }
}
