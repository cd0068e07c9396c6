//! Experiment manifests, cached runs, result records and the acceptance suites.

mod cache;
mod manifest;
pub mod suites;
mod tasks;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use cache::{Cache, CacheEnvelope};
pub use manifest::{parse_named_potential, ExperimentManifest, Params, PotentialArg, Task, CODE_VERSION};
pub use tasks::{default_tolerances, dispatch, Computed, Curve};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub code: String,
    pub message: String,
}

/// Deterministic record of one run; wall-clock data lives in the cache envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub manifest_hash: String,
    pub task: Task,
    pub seed: u64,
    pub code_version: String,
    pub results: serde_json::Value,
    pub residuals: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, Check>,
    pub flags: Vec<String>,
    pub artifacts: Vec<String>,
    pub error: Option<ErrorRecord>,
    pub pass: bool,
}

impl ResultRecord {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: ResultRecord,
    pub from_cache: bool,
    pub envelope: Option<CacheEnvelope>,
}

fn has_null(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(a) => a.iter().any(has_null),
        serde_json::Value::Object(o) => o.values().any(has_null),
        _ => false,
    }
}

fn assemble(m: &ExperimentManifest, hash: &str, computed: std::result::Result<Computed, Error>) -> ResultRecord {
    let mut tol = default_tolerances(m.task);
    tol.extend(m.tolerances.clone());
    let (results, residuals, mut flags, error) = match computed {
        Ok(c) => (c.results, c.residuals, c.flags, None),
        Err(e) => (
            serde_json::Value::Null,
            BTreeMap::new(),
            Vec::new(),
            Some(ErrorRecord { code: e.code().to_string(), message: e.to_string() }),
        ),
    };
    let mut checks = BTreeMap::new();
    for (k, v) in &residuals {
        if !v.is_finite() {
            flags.push(format!("non_finite:{k}"));
        }
        if let Some(&t) = tol.get(k) {
            checks.insert(k.clone(), Check { value: *v, tolerance: t, pass: v.is_finite() && *v <= t });
        }
    }
    if error.is_none() && has_null(&results) {
        flags.push("non_finite_result".to_string());
    }
    let pass = error.is_none() && checks.values().all(|c| c.pass);
    ResultRecord {
        manifest_hash: hash.to_string(),
        task: m.task,
        seed: m.seed,
        code_version: CODE_VERSION.to_string(),
        results,
        residuals,
        checks,
        flags,
        artifacts: Vec::new(),
        error,
        pass,
    }
}

fn curve_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("record");
    out.with_file_name(format!("{stem}.{name}.csv"))
}

fn write_artifacts(out: &Path, curves: &BTreeMap<String, Curve>) -> Result<Vec<String>> {
    let mut paths = Vec::new();
    for (name, c) in curves {
        let p = curve_path(out, name);
        let mut w = csv::Writer::from_path(&p).map_err(|e| Error::Io(e.to_string()))?;
        w.write_record(&c.columns).map_err(|e| Error::Io(e.to_string()))?;
        for row in &c.rows {
            w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        paths.push(p.display().to_string());
    }
    Ok(paths)
}

/// Runs a manifest, serving from `cache` when the content hash is present.
pub fn run(m: &ExperimentManifest, cache: Option<&Cache>) -> Result<RunOutcome> {
    tasks::validate(m.task, &m.params)?;
    let hash = m.hash();
    let mut from_cache = false;
    let mut envelope = None;
    let computed = match cache.map(|c| c.get(&hash)).transpose()?.flatten() {
        Some(env) => {
            from_cache = true;
            let c = env.computed.clone();
            envelope = Some(env);
            Ok(c)
        }
        None => {
            let t0 = Instant::now();
            let res = dispatch(m.task, &m.params, m.seed);
            if let (Some(c), Ok(comp)) = (cache, &res) {
                let env = CacheEnvelope::new(&hash, comp.clone(), t0.elapsed().as_millis());
                c.put(&env)?;
                envelope = Some(env);
            }
            res
        }
    };
    let curves = computed.as_ref().map(|c| c.curves.clone()).unwrap_or_default();
    let mut record = assemble(m, &hash, computed);
    if let Some(out) = &m.output {
        let out = Path::new(out);
        record.artifacts = write_artifacts(out, &curves)?;
        std::fs::write(out, record.to_json_line()? + "\n")?;
    }
    Ok(RunOutcome { record, from_cache, envelope })
}
