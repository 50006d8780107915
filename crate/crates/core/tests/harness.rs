use geovar::harness::{
    check_reports, emit_report, from_json, run_experiment, to_csv, to_json, to_svg, ExperimentConfig, OutputPaths,
    VarianceReport, CSV_HEADER,
};
use geovar::measure::TestFunction;
use std::sync::OnceLock;

fn small() -> ExperimentConfig {
    ExperimentConfig { k_values: vec![12.0, 16.0], ..Default::default() }
}

fn reports() -> &'static [VarianceReport] {
    static R: OnceLock<Vec<VarianceReport>> = OnceLock::new();
    R.get_or_init(|| run_experiment(&small()).unwrap())
}

#[test]
fn zero_test_function_gives_zero_rows() {
    let cfg = ExperimentConfig { k_values: vec![12.0], psi1: TestFunction::zero(), ..Default::default() };
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].empirical_lhs, r[0].empirical_m, r[0].predicted.total), (0.0, 0.0, 0.0));
}

#[test]
fn report_rows_and_decomposition() {
    let r = reports();
    assert_eq!(r.len(), 2);
    check_reports(r, &small().tolerances).unwrap();
    for row in r {
        assert!(row.forms > 0 && row.empirical_lhs > 0.0);
        assert!(row.decomposition_residual.abs() < 1e-9 * row.empirical_lhs.abs().max(1.0));
    }
    assert!(r[0].trend_ratio.is_none() && r[1].trend_ratio.is_some());
}

#[test]
fn csv_json_svg_outputs() {
    let r = reports();
    let csv = to_csv(r);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("12,") && lines[2].starts_with("16,"));
    assert_eq!(from_json(&to_json(r).unwrap()).unwrap(), r);
    let svg = to_svg(r);
    assert_eq!(svg.matches("<polyline").count(), 4);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn emit_writes_requested_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let paths = OutputPaths { csv: Some(dir.join("v.csv")), json: None, svg: Some(dir.join("v.svg")) };
    let written = emit_report(reports(), &paths).unwrap();
    assert_eq!(written.len(), 2);
    assert_eq!(std::fs::read_to_string(dir.join("v.csv")).unwrap(), to_csv(reports()));
    let bad = OutputPaths { csv: Some(dir.join("missing").join("v.csv")), ..Default::default() };
    assert!(emit_report(reports(), &bad).is_err());
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let two = run_experiment(&ExperimentConfig { thread_count: 2, ..small() }).unwrap();
    assert_eq!(two, reports());
}

#[test]
fn invalid_configs_rejected() {
    assert!(run_experiment(&ExperimentConfig { k_values: vec![], ..Default::default() }).is_err());
    assert!(run_experiment(&ExperimentConfig { thread_count: 0, ..Default::default() }).is_err());
    // explicit truncation too short for the shifted sums
    assert!(matches!(
        run_experiment(&ExperimentConfig { truncation: 5, ..small() }),
        Err(geovar::Error::Config(m)) if m.contains("needs")
    ));
}
