use std::process::Command;

fn qpstrip(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpstrip")).args(args).env_remove("QPSTRIP_CACHE_DIR").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn duality_record_passes() {
    let (code, out) = qpstrip(&["duality", "--check", "conjugation", "--p", "5", "--q", "12", "--potential", "random:2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn failing_tolerance_sets_exit_status() {
    let (code, out) = qpstrip(&["acceleration", "--potential", "amo:3", "--n", "300", "--grid", "33", "--tol", "integer_distance=1e-12"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["checks"]["integer_distance"]["pass"], false);
}

#[test]
fn cache_dir_serves_identical_record() {
    let dir = std::env::temp_dir().join(format!("qpstrip-cli-cache-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let args = ["lyapunov", "--potential", "amo:2", "--energy", "0.3", "--n", "100", "--grid", "9", "--cache", d];
    let (_, a) = qpstrip(&args);
    let (_, b) = qpstrip(&args);
    assert_eq!(a, b);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_manifest_reports_structured_error() {
    let path = std::env::temp_dir().join(format!("qpstrip-cli-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"task": "lyapunov", "params": {"nonsense": 1}}"#).unwrap();
    let (code, out) = qpstrip(&["run", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 2);
    assert!(out.contains("\"code\":\"schema\""), "{out}");
}
