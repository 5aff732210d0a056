use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use haar_besov::approx::{a_norm, b_norm_modulus, BesovParams};
use haar_besov::dyadic::{DyadicStepFunction, StepFunction};
use haar_besov::experiments::{random_step, run_experiment, Distribution, Experiment, ExperimentConfig};
use haar_besov::families::{
    alternating_partial, nested_family, scattered, spike, CoefficientRule, NestedSpec, ScatteredSpec,
};
use haar_besov::format::{self, LoadedFunction};
use haar_besov::haar::{analyze, synthesize, tensor_analyze, tensor_synthesize};
use haar_besov::regimes::{classify_with, System};
use haar_besov::sequence::lqlp_norm;
use haar_besov::{Error, Result};

#[derive(Parser)]
#[command(name = "haar-besov", version, about = "Haar systems and Besov quasi-norms on the unit cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis property of a Haar system for given parameters.
    Classify(ClassifyArgs),
    /// Emit a test function.
    Generate(GenerateArgs),
    /// Quasi-norms of a stored function.
    Norm(NormArgs),
    /// Haar analysis or synthesis of a stored function.
    Transform(TransformArgs),
    /// Run a seeded experiment and report fitted growth and bands.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    p: f64,
    /// `inf` is accepted.
    #[arg(long)]
    q: f64,
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Isotropic,
    Tensor,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    prm: ParamArgs,
    #[arg(long, value_enum, default_value_t = SystemArg::Isotropic)]
    system: SystemArg,
    /// Report s >= 1/p as a degenerate space instead of rejecting it.
    #[arg(long)]
    allow_degenerate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Normalized spike `2^(md)` on the lower-corner cube of level m.
    Spike,
    /// Even-level partial sums of the spike's expansion (uses --k).
    Alternating,
    /// Nested family with coefficients `2^(kd)/(k+1)`.
    TrivialDual,
    /// Scattered family (uses --k, --alpha).
    Scattered,
    /// Random dense function (uses --seed, --distribution).
    Random,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FunctionFormat {
    Json,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Normal,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => Distribution::Uniform,
            DistArg::Normal => Distribution::StandardNormal,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    distribution: DistArg,
    /// Sparse families are always JSON; `binary` densifies them.
    #[arg(long, value_enum, default_value_t = FunctionFormat::Json)]
    format: FunctionFormat,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// Dense (JSON or binary) or sparse (JSON) function file.
    input: PathBuf,
    #[command(flatten)]
    prm: ParamArgs,
}

#[derive(Args)]
struct TransformArgs {
    input: PathBuf,
    /// Use the tensor-product system.
    #[arg(long)]
    tensor: bool,
    /// Read coefficients and write the synthesized function.
    #[arg(long)]
    inverse: bool,
    /// Level of the synthesized function (defaults to K).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = |s: &str| s.parse::<Experiment>().map_err(|e| e.to_string()))]
    name: Experiment,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Smallest level.
    #[arg(long)]
    m_min: Option<u32>,
    /// Largest level.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    kmin: Option<u32>,
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    distribution: Option<DistArg>,
    /// Writes OUT.csv and OUT.json; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout format when --out is absent.
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
}

fn emit(bytes: &[u8], out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            let mut lock = std::io::stdout().lock();
            lock.write_all(bytes)?;
            if bytes.last() != Some(&b'\n') {
                lock.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn params(a: &ParamArgs) -> Result<BesovParams> {
    BesovParams::new(a.p, a.q, a.s, a.d)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<()> {
    let prm = BesovParams::unrestricted(a.prm.p, a.prm.q, a.prm.s, a.prm.d)?;
    let system = match a.system {
        SystemArg::Isotropic => System::Isotropic,
        SystemArg::Tensor => System::Tensor,
    };
    let c = classify_with(&prm, system, a.allow_degenerate)?;
    let mut v = json!({ "regime": c.regime.name(), "citation": c.citation });
    if let Some(note) = c.note {
        v["note"] = json!(note);
    }
    emit(serde_json::to_string(&v)?.as_bytes(), &None)
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let sparse = match a.family {
        Family::Spike => spike(a.d, a.m)?,
        Family::Alternating => alternating_partial(a.d, a.k)?,
        Family::TrivialDual => nested_family(&NestedSpec::new(a.d, a.m, CoefficientRule::TrivialDual))?,
        Family::Scattered => scattered(&ScatteredSpec::new(a.k, a.d, a.alpha))?,
        Family::Random => {
            let f = random_step(a.seed, a.d, a.m, a.distribution.into())?;
            return write_dense(&f, a.format, &a.out);
        }
    };
    match a.format {
        FunctionFormat::Json => emit(format::sparse_to_json(&sparse)?.as_bytes(), &a.out),
        FunctionFormat::Binary => write_dense(&sparse.to_dense()?, a.format, &a.out),
    }
}

fn write_dense(f: &DyadicStepFunction, fmt: FunctionFormat, out: &Option<PathBuf>) -> Result<()> {
    match fmt {
        FunctionFormat::Json => emit(format::dense_to_json(f)?.as_bytes(), out),
        FunctionFormat::Binary => {
            if out.is_none() {
                return Err(Error::Parameter("binary output needs --out".into()));
            }
            emit(&format::dense_to_binary(f), out)
        }
    }
}

fn cmd_norm(a: &NormArgs) -> Result<()> {
    let prm = params(&a.prm)?;
    let loaded = format::load_function(&std::fs::read(&a.input)?)?;
    let (lp, anorm, dense) = match &loaded {
        LoadedFunction::Dense(f) => (f.log2_lp_norm_pow(prm.p), a_norm(f, &prm)?, Some(f.clone())),
        LoadedFunction::Sparse(f) => (f.log2_lp_norm_pow(prm.p), a_norm(f, &prm)?, f.to_dense().ok()),
    };
    let mut v = json!({
        "p": prm.p, "q": if prm.q_is_finite() { json!(prm.q) } else { json!("inf") }, "s": prm.s, "d": prm.d,
        "lp_norm": (lp / prm.p).exp2(),
        "a_norm": anorm,
    });
    if let Some(f) = dense {
        v["lqlp_norm"] = json!(lqlp_norm(&analyze(&f), &prm)?);
        if prm.q_is_finite() {
            v["b_norm_modulus"] = json!(b_norm_modulus(&f, &prm)?);
        }
    }
    emit(serde_json::to_string(&v)?.as_bytes(), &None)
}

fn cmd_transform(a: &TransformArgs) -> Result<()> {
    let bytes = std::fs::read(&a.input)?;
    if a.inverse {
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
        let f = if a.tensor {
            tensor_synthesize(&format::tensor_from_json(text)?)
        } else {
            let c = format::coefficients_from_json(text)?;
            synthesize(&c, a.m.unwrap_or(c.max_level()))?
        };
        return emit(format::dense_to_json(&f)?.as_bytes(), &a.out);
    }
    let f = match format::load_function(&bytes)? {
        LoadedFunction::Dense(f) => f,
        LoadedFunction::Sparse(f) => f.to_dense()?,
    };
    let text = if a.tensor {
        format::tensor_to_json(&tensor_analyze(&f))?
    } else {
        format::coefficients_to_json(&analyze(&f))?
    };
    emit(text.as_bytes(), &a.out)
}

/// Returns whether all threshold checks passed.
fn cmd_experiment(a: &ExperimentArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::defaults(a.name);
    cfg.p = a.p.unwrap_or(cfg.p);
    cfg.q = a.q.unwrap_or(cfg.q);
    cfg.s = a.s.unwrap_or(cfg.s);
    cfg.d = a.d.unwrap_or(cfg.d);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.m_min = a.m_min.unwrap_or(cfg.m_min);
    cfg.m_max = a.m.unwrap_or(cfg.m_max);
    cfg.k_min = a.kmin.unwrap_or(cfg.k_min);
    cfg.k_max = a.kmax.unwrap_or(cfg.k_max);
    cfg.samples = a.samples.unwrap_or(cfg.samples);
    cfg.alpha = a.alpha.or(cfg.alpha);
    cfg.distribution = a.distribution.map(Into::into).unwrap_or(cfg.distribution);
    let report = run_experiment(&cfg)?;
    match &a.out {
        Some(prefix) => report.write(prefix)?,
        None => match a.format {
            ReportFormat::Csv => emit(report.csv().as_bytes(), &None)?,
            ReportFormat::Json => emit(report.json()?.as_bytes(), &None)?,
        },
    }
    Ok(report.summary.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a).map(|_| true),
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Norm(a) => cmd_norm(a).map(|_| true),
        Command::Transform(a) => cmd_transform(a).map(|_| true),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
