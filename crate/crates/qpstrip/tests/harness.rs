use qpstrip::harness::suites::{suite, suite_criteria};
use qpstrip::harness::{run, Cache, ExperimentManifest, Params, Task};
use qpstrip::Error;
use serde_json::json;

fn manifest(v: serde_json::Value) -> ExperimentManifest {
    ExperimentManifest::from_value(v).unwrap()
}

#[test]
fn duality_conjugation_record() {
    let m = manifest(json!({"task": "duality_conjugation_residual", "params": {"q": 12, "p": 5, "potential": "random:2", "theta": 0.3}, "seed": 4}));
    let r = run(&m, None).unwrap().record;
    assert!(r.pass);
    assert!(r.residuals["residual"] <= 1e-10);
    assert_eq!(r.checks["residual"].tolerance, 1e-10);
}

#[test]
fn second_run_is_served_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let m = manifest(json!({"task": "lyapunov", "params": {"potential": "amo:2", "energy": [0.3, 0.0], "n": 200, "grid": 17}, "seed": 1}));
    let a = run(&m, Some(&cache)).unwrap();
    let b = run(&m, Some(&cache)).unwrap();
    assert!(!a.from_cache && b.from_cache);
    assert_eq!(a.record.to_json_line().unwrap(), b.record.to_json_line().unwrap());
    let fresh = run(&m, None).unwrap();
    assert_eq!(fresh.record, a.record);
}

#[test]
fn tolerances_do_not_change_the_cache_key() {
    let mut m = manifest(json!({"task": "acceleration", "params": {"potential": "amo:3", "energy": [0.0, 0.0], "n": 500, "grid": 65}}));
    let h = m.hash();
    m.tolerances.insert("integer_distance".into(), 1e-9);
    assert_eq!(m.hash(), h);
    let r = run(&m, None).unwrap().record;
    assert!(!r.checks["integer_distance"].pass);
    assert!(r.checks["collinearity"].pass);
}

#[test]
fn supercritical_acceleration_preset() {
    let m = manifest(json!({"task": "acceleration", "params": {"potential": "amo:3", "energy": [0.0, 0.0], "n": 2000, "grid": 257}}));
    let r = run(&m, None).unwrap().record;
    assert!(r.residuals["integer_distance"] <= 0.1, "{r:?}");
    assert_eq!(r.results["nearest_integer"], json!(1));
}

#[test]
fn unknown_task_and_schema_errors() {
    assert!(matches!(ExperimentManifest::from_json(r#"{"task": "teleport"}"#), Err(Error::UnknownTask(_))));
    assert!(matches!(ExperimentManifest::from_json(r#"{"task": "lyapunov", "params": {"bogus": 1}}"#), Err(Error::Schema(_))));
    assert!(matches!(ExperimentManifest::from_json(r#"{"params": {}}"#), Err(Error::Schema(_))));
    let m = manifest(json!({"task": "chambers", "params": {"q": 5}}));
    assert!(matches!(run(&m, None), Err(Error::Schema(_))));
}

#[test]
fn operation_errors_become_structured_records() {
    let m = manifest(json!({"task": "ids_relation", "params": {"energy": [0.1, 0.5]}}));
    let r = run(&m, None).unwrap().record;
    assert!(!r.pass);
    assert_eq!(r.error.unwrap().code, "domain");
}

#[test]
fn curves_are_written_next_to_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("growth.json");
    let mut m = ExperimentManifest::new(
        Task::PolynomialGrowth,
        Params { potential: Some(qpstrip::harness::PotentialArg::Named("amo:0.5".into())), energy: Some([0.3, 0.0]), n: Some(50), grid: Some(8), ..Default::default() },
        0,
    );
    m.output = Some(out.display().to_string());
    let r = run(&m, None).unwrap().record;
    assert_eq!(r.artifacts.len(), 1);
    let csv = std::fs::read_to_string(&r.artifacts[0]).unwrap();
    assert!(csv.starts_with("k,log_sup_norm\n"));
    assert_eq!(csv.lines().count(), 51);
    let line = std::fs::read_to_string(&out).unwrap();
    assert_eq!(serde_json::from_str::<qpstrip::harness::ResultRecord>(line.trim()).unwrap(), r);
}

#[test]
fn every_task_has_a_default_run() {
    // tasks needing p, q get a small rational frequency
    for name in [
        "continued_fraction", "lyapunov", "classify", "structural_residuals", "exponent_shift", "det_identity_periodic",
        "haro_puig", "thouless", "herman", "greens", "numerator_bound", "denominator_stats", "large_deviation",
        "symplectic_pairing", "uniformity", "eigen_decay", "demo_ar", "polynomial_growth", "cos_symmetry",
        "chambers", "det_identity_scalar", "det_identity_dual", "jensen", "duality_conjugation_residual", "acceleration_count",
    ] {
        let mut params = json!({"n": 8, "grid": 16});
        if ["chambers", "det_identity_scalar", "det_identity_dual", "jensen", "duality_conjugation_residual"].contains(&name) {
            params = json!({"p": 2, "q": 5, "grid": 16});
        }
        if name == "demo_ar" {
            params = json!({"n": 12, "grid": 8, "potential": "amo:0.5", "energy": [0.3, 0.0]});
        }
        if name == "eigen_decay" {
            params = json!({"n": 400, "theta": 0.05, "potential": "amo:0.3333333333333333"});
        }
        let r = run(&manifest(json!({"task": name, "params": params})), None).unwrap().record;
        assert!(r.error.is_none(), "{name}: {:?}", r.error);
        assert!(!r.flags.iter().any(|f| f.starts_with("non_finite")), "{name}: {:?}", r.flags);
    }
}

#[test]
fn suites_are_named() {
    assert_eq!(suite_criteria("identities").unwrap(), &[1, 10]);
    assert!(suite_criteria("appendixA").is_ok());
    assert!(matches!(suite("nope", 0), Err(Error::UnknownTask(_))));
}
