use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use percentile_impact::regression::{
    adjusted_predictions, cluster_robust_vcov, contrast, fit_logit, fit_logit_clustered, pairwise_contrasts, scores,
    DesignMatrix, FitOptions, GroupCoding,
};
use percentile_impact::{Error, RegressionFit};
use proptest::prelude::*;

// (group, pages, authors, y, cluster); produced by oracles/logit_reference.py
const ROWS: &[(usize, f64, f64, f64, usize)] = &[
    (0, 14.0, 3.0, 0.0, 0),
    (1, 3.0, 5.0, 0.0, 0),
    (2, 13.0, 3.0, 1.0, 1),
    (0, 8.0, 7.0, 1.0, 1),
    (1, 6.0, 6.0, 0.0, 2),
    (2, 20.0, 7.0, 1.0, 2),
    (0, 11.0, 6.0, 1.0, 3),
    (1, 15.0, 6.0, 0.0, 3),
    (2, 7.0, 4.0, 0.0, 4),
    (0, 15.0, 2.0, 1.0, 4),
    (1, 16.0, 1.0, 0.0, 5),
    (2, 5.0, 5.0, 1.0, 5),
    (0, 8.0, 2.0, 0.0, 6),
    (1, 15.0, 3.0, 0.0, 6),
    (2, 17.0, 4.0, 0.0, 7),
    (0, 3.0, 5.0, 0.0, 7),
    (1, 14.0, 8.0, 1.0, 8),
    (2, 17.0, 5.0, 1.0, 8),
    (0, 8.0, 1.0, 0.0, 9),
    (1, 8.0, 2.0, 0.0, 9),
    (2, 2.0, 1.0, 1.0, 20),
    (0, 18.0, 5.0, 0.0, 21),
    (1, 8.0, 1.0, 0.0, 22),
    (2, 7.0, 4.0, 1.0, 23),
    (0, 19.0, 7.0, 1.0, 24),
    (1, 12.0, 1.0, 0.0, 25),
    (2, 4.0, 3.0, 0.0, 26),
    (0, 15.0, 7.0, 1.0, 27),
    (1, 14.0, 1.0, 0.0, 28),
    (2, 1.0, 2.0, 0.0, 29),
    (0, 14.0, 1.0, 1.0, 30),
    (1, 13.0, 2.0, 0.0, 31),
    (2, 9.0, 7.0, 1.0, 32),
    (0, 4.0, 7.0, 1.0, 33),
    (1, 16.0, 3.0, 1.0, 34),
    (2, 5.0, 4.0, 1.0, 35),
    (0, 15.0, 6.0, 1.0, 36),
    (1, 5.0, 6.0, 0.0, 37),
    (2, 18.0, 2.0, 1.0, 38),
    (0, 12.0, 8.0, 1.0, 39),
    (1, 8.0, 1.0, 1.0, 40),
    (2, 15.0, 2.0, 1.0, 41),
    (0, 9.0, 4.0, 0.0, 42),
    (1, 19.0, 6.0, 1.0, 43),
    (2, 12.0, 5.0, 0.0, 44),
    (0, 19.0, 4.0, 1.0, 45),
    (1, 1.0, 4.0, 0.0, 46),
    (2, 4.0, 6.0, 0.0, 47),
    (0, 16.0, 8.0, 0.0, 48),
    (1, 19.0, 6.0, 1.0, 49),
    (2, 13.0, 8.0, 1.0, 50),
    (0, 1.0, 3.0, 0.0, 51),
    (1, 14.0, 1.0, 0.0, 52),
    (2, 12.0, 6.0, 0.0, 53),
    (0, 17.0, 3.0, 1.0, 54),
    (1, 15.0, 8.0, 1.0, 55),
    (2, 19.0, 1.0, 0.0, 56),
    (0, 13.0, 7.0, 1.0, 57),
    (1, 17.0, 2.0, 1.0, 58),
    (2, 18.0, 6.0, 0.0, 59),
];

const REF_BETA: [f64; 5] =
    [-1.9977259442139814, -0.8873025732471671, 0.012044296017598035, 0.11224310701690036, 0.23243521221711694];
const REF_SE: [f64; 5] =
    [0.978756719529755, 0.6379889825963098, 0.7054584261034474, 0.05345226147636365, 0.1279583722834549];
const REF_MARGINS: [(f64, f64); 3] = [
    (0.5611702077547015, 0.09950251952717916),
    (0.37411534379321976, 0.08852259636252137),
    (0.5637111334349266, 0.11674836551438615),
];

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|g| format!("G{g}")).collect()
}

/// Design with intercept, k-1 dummies (G0 reference), pages, authors.
fn design_from(rows: &[(usize, f64, f64, f64, usize)], k: usize, reference: Option<&str>) -> DesignMatrix {
    let coding = GroupCoding::new(labels(k), reference, 1).unwrap();
    let ncols = k + 2;
    let mut data = Vec::new();
    for &(g, pages, authors, _, _) in rows {
        let mut row = vec![0.0; ncols];
        row[0] = 1.0;
        if let Some(c) = coding.columns[g] {
            row[c] = 1.0;
        }
        row[ncols - 2] = pages;
        row[ncols - 1] = authors;
        data.extend(row);
    }
    let x = DMatrix::from_row_slice(rows.len(), ncols, &data);
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.3));
    let clusters: Vec<String> = rows.iter().map(|r| format!("c{}", r.4)).collect();
    let mut names = vec!["constant".to_string()];
    for (l, c) in coding.labels.iter().zip(&coding.columns) {
        if c.is_some() {
            names.push(l.clone());
        }
    }
    names.push("pages".into());
    names.push("n_authors".into());
    DesignMatrix::from_parts(x, y, &clusters, names, coding).unwrap()
}

/// Two-group design: intercept plus an indicator for `B`.
fn two_group(ys_a: &[f64], ys_b: &[f64]) -> DesignMatrix {
    let coding = GroupCoding::new(vec!["A".into(), "B".into()], None, 1).unwrap();
    let mut data = Vec::new();
    let mut y = Vec::new();
    for &v in ys_a {
        data.extend([1.0, 0.0]);
        y.push(v);
    }
    for &v in ys_b {
        data.extend([1.0, 1.0]);
        y.push(v);
    }
    let n = y.len();
    let clusters: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    DesignMatrix::from_parts(
        DMatrix::from_row_slice(n, 2, &data),
        DVector::from_vec(y),
        &clusters,
        vec!["constant".into(), "B".into()],
        coding,
    )
    .unwrap()
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// HC0 sandwich times G/(G-1), written with plain loops.
fn hc0_oracle(x: &DMatrix<f64>, y: &DVector<f64>, beta: &[f64]) -> DMatrix<f64> {
    let (n, k) = x.shape();
    let mut a = DMatrix::<f64>::zeros(k, k);
    let mut b = DMatrix::<f64>::zeros(k, k);
    for i in 0..n {
        let eta: f64 = (0..k).map(|j| x[(i, j)] * beta[j]).sum();
        let p = logistic(eta);
        let r = y[i] - p;
        for u in 0..k {
            for v in 0..k {
                a[(u, v)] += p * (1.0 - p) * x[(i, u)] * x[(i, v)];
                b[(u, v)] += r * r * x[(i, u)] * x[(i, v)];
            }
        }
    }
    let ai = a.try_inverse().unwrap();
    &ai * b * &ai * (n as f64 / (n as f64 - 1.0))
}

#[test]
fn clustered_fit_matches_reference_values() {
    let d = design_from(ROWS, 3, None);
    let fit = fit_logit_clustered(&d, FitOptions::default()).unwrap();
    assert!(fit.converged);
    assert_eq!(fit.n_unique_clusters, 50);
    for j in 0..5 {
        assert_abs_diff_eq!(fit.coefficients[j], REF_BETA[j], epsilon = 1e-7);
        assert_abs_diff_eq!(fit.std_errors[j], REF_SE[j], epsilon = 1e-7);
    }
    let preds = adjusted_predictions(&fit, &d, 0.95).unwrap();
    for (p, (m, se)) in preds.iter().zip(REF_MARGINS) {
        assert_abs_diff_eq!(p.prediction, m, epsilon = 1e-7);
        assert_abs_diff_eq!(p.se, se, epsilon = 1e-7);
    }
}

#[test]
fn two_by_two_closed_form() {
    let d = two_group(&[1.0, 0.0, 0.0, 0.0, 0.0], &[1.0, 1.0, 0.0, 0.0, 0.0]);
    let fit = fit_logit(&d, FitOptions::default()).unwrap();
    let b0 = (0.2f64 / 0.8).ln();
    let b1 = (0.4f64 / 0.6).ln() - b0;
    assert_abs_diff_eq!(fit.coefficients[0], b0, epsilon = 1e-6);
    assert_abs_diff_eq!(fit.coefficients[1], b1, epsilon = 1e-6);
    assert_abs_diff_eq!(fit.coefficients[0], -1.3863, epsilon = 1e-4);
    assert_abs_diff_eq!(fit.coefficients[1], 0.9808, epsilon = 1e-4);
    let s = scores(&fit, &d);
    for j in 0..2 {
        assert_abs_diff_eq!(s.column(j).sum(), 0.0, epsilon = 1e-6);
    }
}

#[test]
fn constant_outcome_is_separation() {
    let d = two_group(&[0.0; 4], &[0.0; 4]);
    assert!(matches!(fit_logit(&d, FitOptions::default()), Err(Error::Separation(_))));
}

#[test]
fn perfect_prediction_is_separation() {
    let d = two_group(&[0.0; 4], &[1.0; 4]);
    assert!(matches!(fit_logit(&d, FitOptions::default()), Err(Error::Separation(_))));
}

#[test]
fn collinear_column_is_named() {
    let rows: Vec<_> = ROWS.iter().map(|&(g, p, _, y, c)| (g, p, p, y, c)).collect();
    let d = design_from(&rows, 3, None);
    match fit_logit(&d, FitOptions::default()) {
        Err(Error::RankDeficient(col)) => assert_eq!(col, "n_authors"),
        other => panic!("expected rank deficiency, got {other:?}"),
    }
}

#[test]
fn singleton_clusters_give_scaled_hc0() {
    let rows: Vec<_> = ROWS.iter().take(30).enumerate().map(|(i, &(g, p, a, y, _))| (g, p, a, y, i)).collect();
    let d = design_from(&rows, 3, None);
    let fit = fit_logit(&d, FitOptions::default()).unwrap();
    let v = cluster_robust_vcov(&fit, &d).unwrap();
    let oracle = hc0_oracle(&d.x, &d.y, &fit.coefficients);
    for (a, b) in v.iter().zip(oracle.iter()) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
    }
}

#[test]
fn scalar_sandwich() {
    // intercept only: A = n p(1-p), B = G/(G-1) sum r_i^2 with singleton clusters
    let ys = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let coding = GroupCoding::new(vec!["A".into()], None, 1).unwrap();
    let n = ys.len();
    let clusters: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let d = DesignMatrix::from_parts(
        DMatrix::from_element(n, 1, 1.0),
        DVector::from_row_slice(&ys),
        &clusters,
        vec!["constant".into()],
        coding,
    )
    .unwrap();
    let fit = fit_logit_clustered(&d, FitOptions::default()).unwrap();
    let p = 0.3;
    let a = n as f64 * p * (1.0 - p);
    let b = (3.0 * 0.7f64.powi(2) + 7.0 * 0.3f64.powi(2)) * n as f64 / (n as f64 - 1.0);
    assert_abs_diff_eq!(fit.coefficients[0], (p / (1.0 - p)).ln(), epsilon = 1e-9);
    assert_abs_diff_eq!(fit.vcov[0][0], b / (a * a), epsilon = 1e-12);

    let preds = adjusted_predictions(&fit, &d, 0.95).unwrap();
    assert_abs_diff_eq!(preds[0].prediction, p, epsilon = 1e-12);
    assert_abs_diff_eq!(preds[0].se, p * (1.0 - p) * fit.std_errors[0], epsilon = 1e-12);
}

#[test]
fn contrast_standard_error_from_vcov() {
    let coding = GroupCoding::new(labels(3), None, 1).unwrap();
    let v = vec![vec![0.5, 0.01, 0.02], vec![0.01, 0.04, 0.015], vec![0.02, 0.015, 0.09]];
    let fit = RegressionFit::fixed(vec!["constant".into(), "G1".into(), "G2".into()], coding, vec![-1.0, 0.3, 0.8], v)
        .unwrap();
    let c = contrast(&fit, "G2", "G1").unwrap();
    assert_abs_diff_eq!(c.estimate, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(c.se, (0.04f64 + 0.09 - 2.0 * 0.015).sqrt(), epsilon = 1e-15);
    let all = pairwise_contrasts(&fit).unwrap();
    let names: Vec<_> = all.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(names, ["G1 vs G0", "G2 vs G0", "G2 vs G1"]);
    for c in &all {
        let (raw, adj) = (c.raw_p.unwrap(), c.adjusted_p.unwrap());
        assert_abs_diff_eq!(adj, (3.0 * raw).min(1.0), epsilon = 1e-15);
    }
}

#[test]
fn reference_group_does_not_change_predictions_or_contrasts() {
    let base = fit_logit_clustered(&design_from(ROWS, 3, None), FitOptions::default()).unwrap();
    let d0 = design_from(ROWS, 3, None);
    let p0 = adjusted_predictions(&base, &d0, 0.95).unwrap();
    let c0 = pairwise_contrasts(&base).unwrap();
    for r in ["G1", "G2"] {
        let d = design_from(ROWS, 3, Some(r));
        let fit = fit_logit_clustered(&d, FitOptions::default()).unwrap();
        for (a, b) in adjusted_predictions(&fit, &d, 0.95).unwrap().iter().zip(&p0) {
            assert_eq!(a.group, b.group);
            assert_abs_diff_eq!(a.prediction, b.prediction, epsilon = 1e-8);
            assert_abs_diff_eq!(a.se, b.se, epsilon = 1e-8);
        }
        for (a, b) in pairwise_contrasts(&fit).unwrap().iter().zip(&c0) {
            assert_eq!(a.label, b.label);
            assert_abs_diff_eq!(a.estimate, b.estimate, epsilon = 1e-8);
            assert_abs_diff_eq!(a.se, b.se, epsilon = 1e-8);
        }
    }
}

fn random_rows() -> impl Strategy<Value = Vec<(usize, f64, f64, f64, usize)>> {
    prop::collection::vec((0usize..3, 1u32..30, 1u32..10, prop::bool::ANY), 40..80).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (g, p, a, y))| (g, p as f64, a as f64, if y { 1.0 } else { 0.0 }, i / 2))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn score_equations_hold(rows in random_rows()) {
        let d = design_from(&rows, 3, None);
        if let Ok(fit) = fit_logit(&d, FitOptions::default()) {
            let s = scores(&fit, &d);
            for j in 0..s.ncols() {
                prop_assert!(s.column(j).sum().abs() < 1e-6);
            }
        }
    }

    #[test]
    fn duplicated_rows_keep_coefficients(rows in random_rows()) {
        let single: Vec<_> = rows.iter().enumerate().map(|(i, &(g, p, a, y, _))| (g, p, a, y, i)).collect();
        let doubled: Vec<_> = single
            .iter()
            .flat_map(|&(g, p, a, y, i)| [(g, p, a, y, 2 * i), (g, p, a, y, 2 * i + 1)])
            .collect();
        if let Ok(f1) = fit_logit(&design_from(&single, 3, None), FitOptions::default()) {
            let f2 = fit_logit(&design_from(&doubled, 3, None), FitOptions::default()).unwrap();
            for (a, b) in f1.coefficients.iter().zip(&f2.coefficients) {
                prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn sandwich_is_symmetric_psd(rows in random_rows()) {
        let d = design_from(&rows, 3, None);
        if let Ok(fit) = fit_logit(&d, FitOptions::default()) {
            let v = cluster_robust_vcov(&fit, &d).unwrap();
            let scale = 1.0 + v.amax();
            prop_assert!((&v - v.transpose()).amax() < 1e-12 * scale);
            let eig = v.symmetric_eigen();
            prop_assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10 * scale));
        }
    }
}
