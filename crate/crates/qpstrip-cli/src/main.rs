use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qpstrip::cocycles::Side;
use qpstrip::harness::suites::{criterion, suite, SUITE_NAMES, SUITE_SEED};
use qpstrip::harness::{run, Cache, ExperimentManifest, Params, PotentialArg, Task};
use qpstrip::operators::PotentialSpec;

#[derive(Parser)]
#[command(name = "qpstrip", version, about = "Quasi-periodic operators, their strip duals and localization diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long)]
    alpha: Option<f64>,
    /// golden | sqrt2 | decimal
    #[arg(long)]
    alpha_cf: Option<String>,
    /// amo:LAMBDA | random:D | path to a JSON coefficient file
    #[arg(long)]
    potential: Option<String>,
    /// RE or RE,IM
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// KEY=VAL, repeatable
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// record file; curves go next to it as CSV
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "QPSTRIP_CACHE_DIR")]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Scalar,
    DualOneStep,
    DualBlock,
}

#[derive(Clone, Copy, ValueEnum)]
enum DualityCheck {
    Conjugation,
    Chambers,
    DetScalar,
    DetDual,
    DetPeriodic,
    Jensen,
    AccelerationCount,
    Thouless,
    Ids,
    Herman,
}

#[derive(Clone, Copy, ValueEnum)]
enum GreensKind {
    Bundle,
    Numerator,
    Denominator,
    LargeDeviation,
    Pairing,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocalizationKind {
    Decay,
    Uniformity,
    CosSymmetry,
}

#[derive(Subcommand)]
enum Cmd {
    /// Finite-scale Lyapunov spectrum
    Lyapunov {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "scalar")]
        side: SideArg,
        /// compound-norm cross-check on this many sub-grid points
        #[arg(long)]
        cross_check: Option<usize>,
    },
    /// Acceleration from a three-point slope in the complexification
    Acceleration {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Duality identities and dual-exponent relations
    Duality {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum)]
        check: DualityCheck,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        /// regularization or slope step, depending on the check
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Dual exponent formula residual
    HaroPuig {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Green's function, numerator/denominator bounds and pairing
    Greens {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "bundle")]
        kind: GreensKind,
        #[arg(long)]
        x: Option<usize>,
        #[arg(long)]
        y: Option<usize>,
        #[arg(long)]
        kappa0: Option<f64>,
    },
    /// Eigenvector decay, node uniformity, cosine symmetry
    Localization {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "decay")]
        kind: LocalizationKind,
        #[arg(long)]
        index: Option<usize>,
    },
    /// Almost-reducibility conjugation demo (or the growth fit with --growth)
    DemoAr {
        #[command(flatten)]
        c: Common,
        #[arg(long, allow_hyphen_values = true)]
        strip: Option<f64>,
        #[arg(long)]
        growth: bool,
    },
    /// Acceptance suites: identities | haro_puig | localization | appendix_a | all
    Suite {
        name: String,
        #[arg(long, default_value_t = SUITE_SEED)]
        seed: u64,
    },
    /// Run a manifest file (`-` for stdin)
    Run {
        manifest: PathBuf,
        #[arg(long, env = "QPSTRIP_CACHE_DIR")]
        cache: Option<PathBuf>,
    },
}

fn parse_energy(s: &str) -> anyhow::Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad energy component `{t}`"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => bail!("energy must be RE or RE,IM"),
    }
}

fn parse_potential(s: &str) -> anyhow::Result<PotentialArg> {
    if s.starts_with("amo:") || s.starts_with("random:") {
        return Ok(PotentialArg::Named(s.to_string()));
    }
    let text = std::fs::read_to_string(s).with_context(|| format!("reading potential file `{s}`"))?;
    let spec: PotentialSpec = serde_json::from_str(&text).with_context(|| format!("parsing potential file `{s}`"))?;
    Ok(PotentialArg::Explicit(spec))
}

fn base_params(c: &Common) -> anyhow::Result<Params> {
    Ok(Params {
        alpha: c.alpha,
        alpha_cf: c.alpha_cf.clone(),
        potential: c.potential.as_deref().map(parse_potential).transpose()?,
        energy: c.energy.as_deref().map(parse_energy).transpose()?,
        epsilon: c.epsilon,
        n: c.n,
        grid: c.grid,
        theta: c.theta,
        ..Default::default()
    })
}

fn tolerances(c: &Common) -> anyhow::Result<BTreeMap<String, f64>> {
    c.tol
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').with_context(|| format!("--tol expects KEY=VAL, got `{kv}`"))?;
            Ok((k.to_string(), v.parse::<f64>().with_context(|| format!("bad tolerance `{v}`"))?))
        })
        .collect()
}

fn execute(m: ExperimentManifest, cache: Option<&PathBuf>) -> anyhow::Result<bool> {
    let cache = cache.map(Cache::open).transpose()?;
    let out = run(&m, cache.as_ref())?;
    println!("{}", out.record.to_json_line()?);
    Ok(out.record.pass)
}

fn single(task: Task, c: &Common, params: Params) -> anyhow::Result<bool> {
    let mut m = ExperimentManifest::new(task, params, c.seed);
    m.tolerances = tolerances(c)?;
    m.output = c.out.as_ref().map(|p| p.display().to_string());
    execute(m, c.cache.as_ref())
}

fn main_inner() -> anyhow::Result<bool> {
    match Cli::parse().cmd {
        Cmd::Lyapunov { c, side, cross_check } => {
            let side = match side {
                SideArg::Scalar => Side::Scalar,
                SideArg::DualOneStep => Side::DualOneStep,
                SideArg::DualBlock => Side::DualBlock,
            };
            single(Task::Lyapunov, &c, Params { side: Some(side), cross_check, ..base_params(&c)? })
        }
        Cmd::Acceleration { c, delta } => single(Task::Acceleration, &c, Params { delta, ..base_params(&c)? }),
        Cmd::Duality { c, check, p, q, delta, iterations } => {
            let task = match check {
                DualityCheck::Conjugation => Task::DualityConjugationResidual,
                DualityCheck::Chambers => Task::Chambers,
                DualityCheck::DetScalar => Task::DetIdentityScalar,
                DualityCheck::DetDual => Task::DetIdentityDual,
                DualityCheck::DetPeriodic => Task::DetIdentityPeriodic,
                DualityCheck::Jensen => Task::Jensen,
                DualityCheck::AccelerationCount => Task::AccelerationCount,
                DualityCheck::Thouless => Task::Thouless,
                DualityCheck::Ids => Task::IdsRelation,
                DualityCheck::Herman => Task::Herman,
            };
            single(task, &c, Params { p, q, delta, iterations, ..base_params(&c)? })
        }
        Cmd::HaroPuig { c, p, q } => single(Task::HaroPuig, &c, Params { p, q, ..base_params(&c)? }),
        Cmd::Greens { c, kind, x, y, kappa0 } => {
            let task = match kind {
                GreensKind::Bundle => Task::Greens,
                GreensKind::Numerator => Task::NumeratorBound,
                GreensKind::Denominator => Task::DenominatorStats,
                GreensKind::LargeDeviation => Task::LargeDeviation,
                GreensKind::Pairing => Task::SymplecticPairing,
            };
            single(task, &c, Params { x, y, kappa0, ..base_params(&c)? })
        }
        Cmd::Localization { c, kind, index } => {
            let task = match kind {
                LocalizationKind::Decay => Task::EigenDecay,
                LocalizationKind::Uniformity => Task::Uniformity,
                LocalizationKind::CosSymmetry => Task::CosSymmetry,
            };
            single(task, &c, Params { index, ..base_params(&c)? })
        }
        Cmd::DemoAr { c, strip, growth } => {
            let task = if growth { Task::PolynomialGrowth } else { Task::DemoAr };
            single(task, &c, Params { strip, ..base_params(&c)? })
        }
        Cmd::Suite { name, seed } => {
            let reports = if name == "all" {
                SUITE_NAMES.iter().map(|n| suite(n, seed)).collect::<Result<Vec<_>, _>>()?
            } else {
                vec![suite(&name, seed)?]
            };
            let mut pass = true;
            for r in &reports {
                for c in &r.criteria {
                    eprintln!("{}", c.line());
                    println!("{}", serde_json::to_string(c)?);
                }
                pass &= r.pass;
            }
            if name == "all" {
                let c = criterion(13, seed)?;
                eprintln!("{}", c.line());
                println!("{}", serde_json::to_string(&c)?);
                pass &= c.pass;
            }
            Ok(pass)
        }
        Cmd::Run { manifest, cache } => {
            let text = if manifest.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?
            };
            execute(ExperimentManifest::from_json(&text)?, cache.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let code = e.downcast_ref::<qpstrip::Error>().map(|q| q.code()).unwrap_or("usage");
            println!("{}", serde_json::json!({ "error": { "code": code, "message": format!("{e:#}") } }));
            ExitCode::from(2)
        }
    }
}
