mod common;

use std::fs;
use std::path::Path;

use common::{load_schema, run, validate, write_csv};
use serde_json::Value;

const ARTIFACTS: [&str; 7] = ["report.json", "tables.txt", "fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg"];

fn report(input: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec!["report", "--input", input.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// 120 rows over three groups and two years with covariates.
fn small_rows() -> Vec<String> {
    (0..120)
        .map(|i| {
            let p = ((i * 37) % 100 + 1) as f64 - 0.5;
            format!(
                "P{i:03},Univ {},{},article,S{},{},{p},{},{}",
                i % 3 + 1,
                2008 + i % 2,
                i % 4,
                (i * 13) % 50,
                5 + (i * 7) % 15,
                1 + (i * 3) % 6
            )
        })
        .collect()
}

#[test]
fn bundled_dataset_produces_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = report(&common::dataset(), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for a in ARTIFACTS {
        let meta = fs::metadata(dir.path().join(a)).unwrap_or_else(|_| panic!("{a} missing"));
        assert!(meta.len() > 0, "{a} empty");
    }
    let doc = read_json(&dir.path().join("report.json"));
    validate(&load_schema(), &doc).unwrap();
    assert_eq!(doc["input"]["groups"].as_array().unwrap().len(), 4);
    assert_eq!(doc["tests"]["kruskal_wallis"]["result"]["df"], 3);
    assert_eq!(doc["tests"]["pairwise"]["result"]["m"], 6);
    let tables = fs::read_to_string(dir.path().join("tables.txt")).unwrap();
    assert!(!tables.contains('\x1b'));
    assert!(tables.contains("Kruskal-Wallis"));
}

#[test]
fn single_group_marks_group_tests_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<String> =
        small_rows().into_iter().map(|r| r.replacen("Univ 2", "Univ 1", 1).replacen("Univ 3", "Univ 1", 1)).collect();
    let input = write_csv(dir.path(), "one.csv", &rows);
    let out = report(&input, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("report.json"));
    validate(&load_schema(), &doc).unwrap();
    for t in ["kruskal_wallis", "pairwise", "chi_square"] {
        assert_eq!(doc["tests"][t]["status"], "not_applicable", "{t}");
    }
    assert_eq!(doc["regression"]["status"], "not_applicable");
    for a in ARTIFACTS {
        assert!(dir.path().join(a).exists(), "{a} missing");
    }
}

#[test]
fn missing_covariates_skip_regression_with_notice() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<String> = small_rows()
        .into_iter()
        .map(|r| {
            let mut cells: Vec<&str> = r.split(',').collect();
            cells[7] = "";
            cells[8] = "";
            cells.join(",")
        })
        .collect();
    let input = write_csv(dir.path(), "bare.csv", &rows);
    let out = report(&input, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("report.json"));
    validate(&load_schema(), &doc).unwrap();
    assert_eq!(doc["regression"]["status"], "not_applicable");
    assert_eq!(doc["regression"]["reason"], "zero usable rows");
    assert!(doc["notices"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("regression skipped")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regression skipped"));
}

#[test]
fn invalid_rows_fail_validation_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = small_rows();
    rows.push("BAD1,Univ 1,2008,article,S1,,,3,2".into());
    rows.push("BAD2,Univ 1,20x8,article,S1,4,,3,2".into());
    let input = write_csv(dir.path(), "bad.csv", &rows);
    let out = run(&["validate", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    // CSV diagnostics carry file lines; the header is line 1
    assert!(err.contains("row 122"), "{err}");
    assert!(err.contains("row 123"), "{err}");

    let strict = report(&input, dir.path(), &["--strict"]);
    assert_eq!(strict.status.code(), Some(1));
    let lenient = report(&input, dir.path(), &[]);
    assert_eq!(lenient.status.code(), Some(0));
    let doc = read_json(&dir.path().join("report.json"));
    assert_eq!(doc["input"]["rejected_rows"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_file_and_bad_flags_exit_one() {
    assert_eq!(run(&["validate", "--input", "/nonexistent.csv"]).status.code(), Some(1));
    let data = common::dataset();
    let d = data.to_str().unwrap();
    assert_eq!(run(&["indicators", "--input", d, "--alpha", "1.5"]).status.code(), Some(1));
    assert_ne!(run(&["indicators", "--input", d, "--scheme", "bogus"]).status.code(), Some(0));
}

#[test]
fn separation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // every Univ 2 paper is top 10%, no Univ 1 paper is
    let rows: Vec<String> = (0..40)
        .map(|i| {
            let (g, p) = if i % 2 == 0 { (1, 20.0 + i as f64) } else { (2, 1.0 + (i % 9) as f64) };
            format!("Q{i},Univ {g},2008,article,S,{i},{p},{},{}", 3 + i % 7, 1 + i % 4)
        })
        .collect();
    let input = write_csv(dir.path(), "sep.csv", &rows);
    let out = run(&["regress", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regression:"));
}

#[test]
fn json_input_gives_same_report_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "small.csv", &small_rows());
    let records: Vec<Value> = small_rows()
        .iter()
        .map(|r| {
            let c: Vec<&str> = r.split(',').collect();
            serde_json::json!({
                "pub_id": c[0], "group": c[1], "year": c[2].parse::<i64>().unwrap(), "doc_type": c[3],
                "subject": [c[4]], "citations": c[5].parse::<u64>().unwrap(), "percentile": c[6].parse::<f64>().unwrap(),
                "pages": c[7].parse::<u64>().unwrap(), "n_authors": c[8].parse::<u64>().unwrap(),
            })
        })
        .collect();
    let json = dir.path().join("small.json");
    fs::write(&json, serde_json::to_string(&records).unwrap()).unwrap();
    let a = run(&["indicators", "--input", csv.to_str().unwrap()]);
    let b = run(&["indicators", "--input", json.to_str().unwrap(), "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn subcommands_emit_their_sections() {
    let data = common::dataset();
    let d = data.to_str().unwrap();
    let out = run(&["classify", "--input", d, "--classes", "pr2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["labels"], serde_json::json!(["<90%", "10%"]));

    let out = run(&["test", "--input", d, "--alpha", "0.05"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kruskal_wallis"]["result"]["alpha"], 0.05);

    let out = run(&["regress", "--input", d, "--ref-group", "Univ 3"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["fit"]["coding"]["reference"], "Univ 3");
    assert_eq!(v["result"]["fit"]["vcov_kind"], "cluster_robust");

    let out = run(&["indicators", "--input", d, "--ci", "wald"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["top10"]["method"], "wald");

    let out = run(&["validate", "--input", d]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 rejected"));
}

#[test]
fn percentiles_fills_from_citations() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<String> = (0..10).map(|i| format!("C{i},Univ {},2008,article,S,{i},,,", i % 2 + 1)).collect();
    let input = write_csv(dir.path(), "cites.csv", &rows);
    for (scheme, top) in [("incites_ge", "10"), ("complement_exclusive", "10")] {
        let out = run(&["percentiles", "--input", input.to_str().unwrap(), "--scheme", scheme]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let c9 = text.lines().find(|l| l.starts_with("C9,")).unwrap();
        assert_eq!(c9.split(',').nth(6), Some(top));
        let c0 = text.lines().find(|l| l.starts_with("C0,")).unwrap();
        assert_eq!(c0.split(',').nth(6), Some("100"));
    }
}

#[test]
fn plot_writes_only_figures() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "small.csv", &small_rows());
    let out_dir = dir.path().join("figs");
    let out = run(&["plot", "--input", input.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<String> =
        fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg"]);
}

/// Figures of a small fixed input against committed copies. Set
/// `UPDATE_GOLDEN=1` to rewrite them after an intended rendering change.
#[test]
fn figures_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "small.csv", &small_rows());
    let out = report(&input, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for i in 1..=5 {
        let name = format!("fig{i}.svg");
        let got = fs::read_to_string(dir.path().join(&name)).unwrap();
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::create_dir_all(&golden).unwrap();
            fs::write(golden.join(&name), &got).unwrap();
            continue;
        }
        let want = fs::read_to_string(golden.join(&name)).unwrap();
        assert!(got == want, "{name} differs from the golden copy");
    }
}
