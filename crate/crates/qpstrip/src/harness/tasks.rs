use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::manifest::{Params, Task};
use crate::arithmetic::continued_fraction;
use crate::cocycles::{
    acceleration, classify_energy, exponent_shift_residual, finite_lyapunov_spectrum, product, structural_residuals,
    Cocycle, CocycleSpec, Side,
};
use crate::duality::*;
use crate::error::{Error, Result};
use crate::localization::*;
use crate::operators::duality_conjugation_residual;
use crate::random;

/// Plot-ready table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Deterministic output of one task (everything except wall-clock data).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Computed {
    pub results: Value,
    pub residuals: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    pub curves: BTreeMap<String, Curve>,
}

impl Computed {
    fn new(results: Value) -> Self {
        Self { results, residuals: BTreeMap::new(), flags: Vec::new(), curves: BTreeMap::new() }
    }

    fn residual(mut self, key: &str, v: f64) -> Self {
        self.residuals.insert(key.to_string(), v);
        self
    }

    fn flag_if(mut self, cond: bool, f: &str) -> Self {
        if cond {
            self.flags.push(f.to_string());
        }
        self
    }

    fn curve(mut self, name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        self.curves.insert(name.to_string(), Curve { columns: columns.iter().map(|s| s.to_string()).collect(), rows });
        self
    }
}

/// Default tolerance per residual key, by task.
pub fn default_tolerances(task: Task) -> BTreeMap<String, f64> {
    let pairs: &[(&str, f64)] = match task {
        Task::DualityConjugationResidual => &[("residual", 1e-10)],
        Task::Lyapunov => &[("symplectic_symmetry", 2e-2)],
        Task::Acceleration => &[("integer_distance", 0.1), ("collinearity", 1e-2)],
        Task::StructuralResiduals => &[
            ("symplectic", 1e-8),
            ("block_recursions", 1e-8),
            ("d_step_conjugation", 1e-8),
            ("f_eps_conjugation", 1e-8),
        ],
        Task::ExponentShift => &[("max_residual", 2e-2)],
        Task::Chambers => &[("max_deviation_rel", 1e-8), ("a_vs_d0_rel", 1e-8)],
        Task::DetIdentityScalar | Task::DetIdentityDual | Task::DetIdentityPeriodic => &[("residual", 1e-8)],
        Task::Jensen => &[("product_defect", 1e-12)],
        Task::HaroPuig => &[("residual", 5e-2)],
        Task::AccelerationCount => &[("residual", 0.1)],
        Task::Thouless => &[("residual", 1e-1)],
        Task::IdsRelation => &[("residual", 2e-2)],
        Task::Herman => &[("deficit", 1e-2)],
        Task::Greens => &[("inverse_residual", 1e-8), ("cramer", 1e-7)],
        Task::NumeratorBound => &[("margin_deficit", 5e-2)],
        Task::SymplecticPairing => &[("pairing_gap", 1e-8)],
        Task::DemoAr => &[("det_error", 1e-10)],
        Task::PolynomialGrowth => &[("exponent", 10.0)],
        Task::CosSymmetry => &[("rel_residual", 1e-9)],
        _ => &[],
    };
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn to_value<S: Serialize>(s: &S) -> Result<Value> {
    Ok(serde_json::to_value(s)?)
}

fn need<T: Copy>(x: Option<T>, name: &str) -> Result<T> {
    Params::need(x, name)
}

fn spec(p: &Params, seed: u64, default_side: Side) -> Result<CocycleSpec<f64>> {
    Ok(CocycleSpec::new(
        p.alpha()?,
        p.potential(seed)?,
        p.energy(),
        p.epsilon.unwrap_or(0.0),
        p.side.unwrap_or(default_side),
    ))
}

pub fn dispatch(task: Task, p: &Params, seed: u64) -> Result<Computed> {
    let n_or = |d: usize| p.n.unwrap_or(d);
    let grid_or = |d: usize| p.grid.unwrap_or(d);
    let theta = p.theta.unwrap_or(0.0);
    let eps = p.epsilon.unwrap_or(0.0);
    match task {
        Task::ContinuedFraction => {
            let cf = continued_fraction(p.alpha()?, p.max_terms.unwrap_or(30))?;
            Ok(Computed::new(to_value(&cf)?))
        }
        Task::DualityConjugationResidual => {
            let r = duality_conjugation_residual(need(p.p, "p")?, need(p.q, "q")?, theta, eps, &p.potential(seed)?)?;
            Ok(Computed::new(json!({ "residual": r })).residual("residual", r))
        }
        Task::Lyapunov => {
            let s = spec(p, seed, Side::Scalar)?;
            let l = finite_lyapunov_spectrum(&s, n_or(1000), grid_or(65), p.cross_check)?;
            let mut out = Computed::new(to_value(&l)?);
            if s.side == Side::DualBlock && s.epsilon == 0.0 && s.energy.im == 0.0 {
                let k = l.exponents.len();
                let sym = (0..k / 2).map(|j| (l.exponents[j] + l.exponents[k - 1 - j]).abs()).fold(0.0, f64::max);
                out = out.residual("symplectic_symmetry", sym);
            }
            if let Some(g) = l.cross_method_gap {
                out = out.residual("cross_method_gap", g);
            }
            Ok(out)
        }
        Task::Acceleration => {
            let s = spec(p, seed, Side::Scalar)?.with_epsilon(0.0);
            let a = acceleration(&s, eps, p.delta.unwrap_or(0.01), n_or(1000), grid_or(65))?;
            let rows = a.curve.iter().map(|&(e, l)| vec![e, l]).collect();
            Ok(Computed::new(to_value(&a)?)
                .residual("integer_distance", a.integer_distance)
                .residual("collinearity", a.collinearity)
                .flag_if(a.near_kink, "near_kink")
                .curve("acceleration", &["epsilon", "lyapunov"], rows))
        }
        Task::Classify => {
            let s = spec(p, seed, Side::Scalar)?;
            Ok(Computed::new(to_value(&classify_energy(&s, n_or(1000), grid_or(65), 0.05)?)?))
        }
        Task::StructuralResiduals => {
            let s = spec(p, seed, Side::DualBlock)?;
            let reps = structural_residuals(&s, theta, n_or(5))?;
            let mut out = Computed::new(to_value(&reps)?);
            for r in &reps {
                out = out.residual(&r.identity, r.rel_residual);
            }
            Ok(out)
        }
        Task::ExponentShift => {
            let s = spec(p, seed, Side::DualOneStep)?;
            let list = p.eps_list.clone().unwrap_or_else(|| vec![0.02, 0.05]);
            let r = exponent_shift_residual(&s, n_or(1000), grid_or(65), &list)?;
            Ok(Computed::new(to_value(&r)?).residual("max_residual", r.max_residual))
        }
        Task::Chambers => {
            let r = chambers_decomposition(need(p.p, "p")?, need(p.q, "q")?, p.energy(), eps, &p.potential(seed)?, grid_or(32))?;
            let scale = r.a_constant[0].hypot(r.a_constant[1]).max(1.0);
            Ok(Computed::new(to_value(&r)?)
                .residual("max_deviation_rel", r.max_deviation / scale)
                .residual("a_vs_d0_rel", r.a_vs_d0 / scale))
        }
        Task::DetIdentityScalar | Task::DetIdentityDual | Task::DetIdentityPeriodic => {
            let v = p.potential(seed)?;
            let r = match task {
                Task::DetIdentityScalar => det_identity_scalar(need(p.p, "p")?, need(p.q, "q")?, theta, eps, p.energy(), &v)?,
                Task::DetIdentityDual => det_identity_dual(need(p.p, "p")?, need(p.q, "q")?, theta, eps, p.energy(), &v)?,
                _ => det_identity_periodic(p.alpha()?, theta, &v, n_or(5), p.energy())?,
            };
            let flags = r.flags.clone();
            let mut out = Computed::new(to_value(&r)?).residual("residual", r.rel_residual);
            out.flags.extend(flags);
            Ok(out)
        }
        Task::Jensen => {
            let r = jensen_average(need(p.p, "p")?, need(p.q, "q")?, p.energy(), eps, &p.potential(seed)?, grid_or(1024))?;
            let mut out = Computed::new(to_value(&r)?).residual("product_defect", r.product_defect).residual("residual", r.residual);
            out.residuals.insert("residual_over_tolerance".into(), r.residual / r.tolerance);
            Ok(out.flag_if(r.near_singular, "near_singular"))
        }
        Task::HaroPuig => {
            let v = p.potential(seed)?;
            let r = match (p.p, p.q) {
                (Some(pp), Some(qq)) => haro_puig_rational(pp, qq, p.energy(), eps, &v, grid_or(64))?,
                _ => haro_puig_residual(p.alpha()?, p.energy(), eps, &v, n_or(2000), grid_or(65))?,
            };
            Ok(Computed::new(to_value(&r)?).residual("residual", r.residual).flag_if(r.ambiguous, "ambiguous_band"))
        }
        Task::AccelerationCount => {
            let r = acceleration_count_residual(
                p.alpha()?,
                p.energy(),
                eps,
                &p.potential(seed)?,
                n_or(1000),
                grid_or(65),
                p.delta.unwrap_or(0.01),
            )?;
            Ok(Computed::new(to_value(&r)?).residual("residual", r.residual).flag_if(r.ambiguous, "ambiguous_band"))
        }
        Task::Thouless => {
            let e = p.energy();
            let eta = p.delta.unwrap_or(if e.im == 0.0 { 1e-3 } else { 0.0 });
            let r = thouless_residual(p.alpha()?, &p.potential(seed)?, e, n_or(400), eta)?;
            Ok(Computed::new(to_value(&r)?).residual("residual", r.residual))
        }
        Task::IdsRelation => {
            let r = ids_relation_residual(p.alpha()?, &p.potential(seed)?, p.real_energy()?, n_or(600), p.iterations.unwrap_or(100_000))?;
            Ok(Computed::new(to_value(&r)?).residual("residual", r.residual))
        }
        Task::Herman => {
            let r = herman_lower_bound(p.alpha()?, &p.potential(seed)?, p.real_energy()?, n_or(6), grid_or(512))?;
            Ok(Computed::new(to_value(&r)?).residual("deficit", (-r.value).max(0.0)))
        }
        Task::Greens => {
            let b = greens_bundle(p.alpha()?, theta, &p.potential(seed)?, n_or(5), p.energy())?;
            let mut rng = random::stream(seed, 1);
            let size = b.size();
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                let (x, y) = (rng.gen_range(0..size), rng.gen_range(0..size));
                worst = worst.max(b.cramer_residual(x, y)?);
            }
            let res = json!({
                "size": size,
                "log_abs_f": b.f.log_abs,
                "f_phase": [b.f.mantissa.re, b.f.mantissa.im],
                "inverse_residual": b.inverse_residual,
                "cramer_max_rel": worst,
            });
            Ok(Computed::new(res).residual("inverse_residual", b.inverse_residual).residual("cramer", worst))
        }
        Task::NumeratorBound => {
            let g = grid_or(64);
            let thetas: Vec<f64> = (0..g).map(|j| j as f64 / g as f64).collect();
            let n = n_or(24);
            let d = p.potential(seed)?.degree();
            let r = numerator_bound_profile(p.alpha()?, &thetas, &p.potential(seed)?, n, p.real_energy()?, p.x.unwrap_or(0), p.y.unwrap_or(n * d / 2))?;
            Ok(Computed::new(to_value(&r)?).residual("margin_deficit", (-r.margin).max(0.0)))
        }
        Task::DenominatorStats => {
            let r = denominator_stats(
                p.alpha()?,
                &p.potential(seed)?,
                p.real_energy()?,
                n_or(34),
                p.epsilon.unwrap_or(0.05),
                grid_or(1024),
                p.kappa0.unwrap_or(DEFAULT_KAPPA0),
            )?;
            let flags = r.flags.clone();
            let mut out = Computed::new(to_value(&r)?);
            if r.admissible {
                out = out.residual("fraction", r.fraction);
            }
            out.flags.extend(flags);
            Ok(out)
        }
        Task::LargeDeviation => {
            let r = large_deviation_measure(p.alpha()?, &p.potential(seed)?, p.real_energy()?, n_or(100), p.epsilon.unwrap_or(0.1), grid_or(256))?;
            Ok(Computed::new(to_value(&r)?))
        }
        Task::SymplecticPairing => {
            let s = spec(p, seed, Side::DualBlock)?.with_side(Side::DualBlock).with_epsilon(0.0);
            let m = product(&Cocycle::new(s)?, Complex::new(theta, 0.0), n_or(5));
            let r = symplectic_pairing_check(&m)?;
            Ok(Computed::new(to_value(&r)?).residual("pairing_gap", r.pairing_gap).flag_if(!r.subspace_resolved, "subspace_unresolved"))
        }
        Task::Uniformity => {
            let thetas = match &p.thetas {
                Some(t) => t.clone(),
                None => {
                    let a = p.alpha()?;
                    (0..n_or(13)).map(|j| theta + j as f64 * a).collect()
                }
            };
            let z: Vec<f64> = (0..=400).map(|j| -1.0 + j as f64 / 200.0).collect();
            Ok(Computed::new(to_value(&uniformity_measure(&thetas, &z)?)?))
        }
        Task::EigenDecay => {
            let which = match (p.index, p.energy) {
                (Some(i), _) => EigenSelect::Index(i),
                (None, Some(e)) => EigenSelect::Energy(e[0]),
                (None, None) => EigenSelect::Index(n_or(400) / 2),
            };
            let r = eigen_decay_profile(p.alpha()?, theta, &p.potential(seed)?, n_or(400), which)?;
            let rows = r.profile.iter().map(|&(k, l)| vec![k as f64, l]).collect();
            let mut summary = to_value(&r)?;
            if let Some(o) = summary.as_object_mut() {
                o.remove("profile");
            }
            Ok(Computed::new(summary).flag_if(!r.localized, "non_localized").curve("decay", &["k", "log_abs_u"], rows))
        }
        Task::DemoAr => {
            let cfg = DemoConfig::default();
            let r = almost_reducibility_demo(p.alpha()?, &p.potential(seed)?, p.real_energy()?, n_or(33), p.strip.unwrap_or(0.0), grid_or(64), &cfg)?;
            Ok(Computed::new(to_value(&r)?).residual("det_error", r.max_det_error))
        }
        Task::PolynomialGrowth => {
            let r = polynomial_growth_fit(p.alpha()?, &p.potential(seed)?, p.real_energy()?, n_or(500), p.strip.unwrap_or(0.0), grid_or(32))?;
            let rows = r.curve.iter().map(|&(k, l)| vec![k as f64, l]).collect();
            let mut summary = to_value(&r)?;
            if let Some(o) = summary.as_object_mut() {
                o.remove("curve");
            }
            Ok(Computed::new(summary).residual("exponent", r.exponent).curve("growth", &["k", "log_sup_norm"], rows))
        }
        Task::CosSymmetry => {
            let r = cos_polynomial_symmetry(p.alpha()?, &p.potential(seed)?, n_or(4), p.real_energy()?, grid_or(64))?;
            Ok(Computed::new(to_value(&r)?).residual("rel_residual", r.rel_residual))
        }
    }
}

/// Rejects parameter combinations no task accepts before running anything.
pub fn validate(task: Task, p: &Params) -> Result<()> {
    if let Some(n) = p.grid {
        if n == 0 {
            return Err(Error::Schema("grid must be positive".into()));
        }
    }
    if matches!(task, Task::Chambers | Task::DetIdentityScalar | Task::DetIdentityDual | Task::Jensen | Task::DualityConjugationResidual)
        && (p.p.is_none() || p.q.is_none())
    {
        return Err(Error::Schema(format!("task `{}` needs `p` and `q`", task.name())));
    }
    Ok(())
}
