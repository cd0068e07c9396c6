use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operators::{PotentialSpec, TrigPotential};
use crate::random;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    ContinuedFraction,
    DualityConjugationResidual,
    Lyapunov,
    Acceleration,
    Classify,
    StructuralResiduals,
    ExponentShift,
    Chambers,
    DetIdentityScalar,
    DetIdentityDual,
    DetIdentityPeriodic,
    Jensen,
    HaroPuig,
    AccelerationCount,
    Thouless,
    IdsRelation,
    Herman,
    Greens,
    NumeratorBound,
    DenominatorStats,
    LargeDeviation,
    SymplecticPairing,
    Uniformity,
    EigenDecay,
    DemoAr,
    PolynomialGrowth,
    CosSymmetry,
}

impl Task {
    pub fn name(&self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }
}

/// `"amo:LAMBDA"`, `"random:D"` (seeded from the manifest) or an explicit coefficient list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialArg {
    Named(String),
    Explicit(PotentialSpec),
}

/// Union of all task parameters; each task reads the fields it needs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `golden`, `sqrt2` or a decimal string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_cf: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialArg>,
    /// `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<crate::cocycles::Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub task: Task,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentManifest {
    pub fn new(task: Task, params: Params, seed: u64) -> Self {
        Self { task, params, seed, tolerances: BTreeMap::new(), output: None }
    }

    /// Parses JSON, separating unknown tasks from other schema errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        Self::from_value(v)
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Schema("manifest must be an object".into()))?;
        let task = obj.get("task").ok_or_else(|| Error::Schema("missing field `task`".into()))?;
        if serde_json::from_value::<Task>(task.clone()).is_err() {
            return Err(Error::UnknownTask(task.to_string()));
        }
        serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Content hash of `(task, params, seed, code version)`.
    pub fn hash(&self) -> String {
        let key = serde_json::json!({
            "task": self.task,
            "params": self.params,
            "seed": self.seed,
            "code_version": CODE_VERSION,
        });
        hex::encode(Sha256::digest(key.to_string().as_bytes()))
    }
}

impl Params {
    pub fn alpha(&self) -> Result<f64> {
        if let Some(a) = self.alpha {
            return Ok(a);
        }
        match self.alpha_cf.as_deref() {
            None | Some("golden") => Ok((5f64.sqrt() - 1.0) / 2.0),
            Some("sqrt2") => Ok(2f64.sqrt() - 1.0),
            Some(s) => s.parse::<f64>().map_err(|_| Error::Schema(format!("bad alpha_cf `{s}`"))),
        }
    }

    pub fn potential(&self, seed: u64) -> Result<TrigPotential<f64>> {
        match &self.potential {
            None => TrigPotential::amo(1.0),
            Some(PotentialArg::Explicit(s)) => TrigPotential::from_spec(s),
            Some(PotentialArg::Named(s)) => parse_named_potential(s, seed),
        }
    }

    pub fn energy(&self) -> num_complex::Complex<f64> {
        let [a, b] = self.energy.unwrap_or([0.0, 0.0]);
        num_complex::Complex::new(a, b)
    }

    pub fn real_energy(&self) -> Result<f64> {
        let e = self.energy();
        if e.im != 0.0 {
            return Err(Error::Domain("this task needs a real energy".into()));
        }
        Ok(e.re)
    }

    pub fn need<T: Copy>(field: Option<T>, name: &str) -> Result<T> {
        field.ok_or_else(|| Error::Schema(format!("missing parameter `{name}`")))
    }
}

pub fn parse_named_potential(s: &str, seed: u64) -> Result<TrigPotential<f64>> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| Error::Schema(format!("bad potential `{s}`")))?;
    match kind {
        "amo" => {
            let l: f64 = arg.parse().map_err(|_| Error::Schema(format!("bad coupling `{arg}`")))?;
            TrigPotential::amo(l)
        }
        "random" => {
            let d: usize = arg.parse().map_err(|_| Error::Schema(format!("bad degree `{arg}`")))?;
            if d == 0 {
                return Err(Error::Schema("degree must be positive".into()));
            }
            Ok(TrigPotential::random_real(&mut random::stream(seed, 0), d))
        }
        _ => Err(Error::Schema(format!("unknown potential kind `{kind}`"))),
    }
}
