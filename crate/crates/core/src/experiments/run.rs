use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_linear, fit_log2_slope, Fit};
use super::rng::{derive_seed, random_step, Distribution};
use crate::approx::{a_norm, b_norm_from_profile, BesovParams, ModulusProfile};
use crate::error::{param_err, Error, Result};
use crate::families::{
    nested_closed_form, scattered_closed_norms, spike, tensor_spike_pair, CoefficientRule, NestedSpec, ScatteredSpec,
};
use crate::haar::analyze;
use crate::regimes::{classify, Classification, Regime, System};
use crate::sequence::lqlp_norm;

pub const SCHEMA_VERSION: u32 = 1;
/// Relative tolerance for "s lies on the critical line" checks.
const LINE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Equivalence,
    ModulusVsApprox,
    TrivialDual,
    UncondFail,
    BasisFail,
    TensorFail,
    ClassifySweep,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Equivalence,
        Experiment::ModulusVsApprox,
        Experiment::TrivialDual,
        Experiment::UncondFail,
        Experiment::BasisFail,
        Experiment::TensorFail,
        Experiment::ClassifySweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Equivalence => "equivalence",
            Experiment::ModulusVsApprox => "modulus-vs-approx",
            Experiment::TrivialDual => "trivial-dual",
            Experiment::UncondFail => "uncond-fail",
            Experiment::BasisFail => "basis-fail",
            Experiment::TensorFail => "tensor-fail",
            Experiment::ClassifySweep => "classify-sweep",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown experiment '{s}'")))
    }
}

/// Everything that determines a run; equal configs give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub d: usize,
    /// Level range of random or nested functions.
    pub m_min: u32,
    pub m_max: u32,
    /// Scale range of the growth families.
    pub k_min: u32,
    pub k_max: u32,
    /// Random functions per level.
    pub samples: usize,
    pub seed: u64,
    /// Decay exponent of the scattered family; `1/(2q)` when absent.
    pub alpha: Option<f64>,
    pub distribution: Distribution,
}

impl ExperimentConfig {
    /// Defaults reproducing the reference setting of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            p: 2.0,
            q: 2.0,
            s: 0.25,
            d: 1,
            m_min: 2,
            m_max: 5,
            k_min: 2,
            k_max: 7,
            samples: 50,
            seed: 0x5EED,
            alpha: None,
            distribution: Distribution::Uniform,
        };
        match experiment {
            Experiment::Equivalence | Experiment::ClassifySweep => base,
            Experiment::ModulusVsApprox => Self { p: 1.0, q: 1.0, s: 0.5, ..base },
            Experiment::TrivialDual => Self { p: 0.6, q: 1.0, s: 1.0 / 3.0, m_min: 4, m_max: 16, ..base },
            Experiment::UncondFail => Self { p: 0.8, q: 0.8, s: 0.25, m_min: 8, m_max: 16, k_min: 2, k_max: 8, ..base },
            Experiment::BasisFail => Self { p: 0.7, q: 1.0, s: 1.0 / 0.7 - 1.0, k_min: 2, k_max: 7, ..base },
            Experiment::TensorFail => Self { p: 0.5, q: 1.0, s: 1.0, d: 2, k_min: 2, k_max: 10, ..base },
        }
    }

    pub fn params(&self) -> Result<BesovParams> {
        BesovParams::new(self.p, self.q, self.s, self.d)
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub d: usize,
    pub scale: f64,
    pub value: f64,
    pub log2_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub scale: f64,
    pub value: f64,
    pub log2_value: f64,
}

/// Fitted growth of a measured quantity against a scale parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub series: String,
    /// `log2` for fits of `log2 value`, `linear` for fits of the value itself.
    pub fit_kind: &'static str,
    pub rows: Vec<GrowthRow>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub theoretical_slope: Option<f64>,
    pub relative_deviation: Option<f64>,
}

impl GrowthReport {
    /// Fits the rows with scale >= 2.
    pub fn new(series: &str, points: &[(f64, f64)], log: bool, theoretical: Option<f64>) -> Result<Self> {
        let used: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= 2.0).collect();
        let Fit { slope, intercept, r2 } = if log { fit_log2_slope(&used)? } else { fit_linear(&used)? };
        let relative_deviation = theoretical.filter(|t| *t != 0.0).map(|t| (slope - t).abs() / t.abs());
        Ok(Self {
            series: series.to_string(),
            fit_kind: if log { "log2" } else { "linear" },
            rows: points.iter().map(|&(scale, value)| GrowthRow { scale, value, log2_value: value.log2() }).collect(),
            slope,
            intercept,
            r2,
            theoretical_slope: theoretical,
            relative_deviation,
        })
    }
}

/// Spread of a ratio over many instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Band {
    pub series: String,
    pub min: f64,
    pub max: f64,
    pub max_over_min: f64,
    /// Least-squares slope of `log2 value` against the scale.
    pub log2_slope: f64,
}

impl Band {
    fn new(series: &str, points: &[(f64, f64)]) -> Result<Self> {
        let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let scales_vary = points.iter().any(|p| p.0 != points[0].0);
        let log2_slope = if scales_vary && points.len() >= 3 { fit_log2_slope(points)?.slope } else { 0.0 };
        Ok(Self { series: series.to_string(), min, max, max_over_min: max / min, log2_slope })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub passed: bool,
}

fn check(name: &str, value: f64, threshold: &str, passed: bool) -> Check {
    Check { name: name.to_string(), value, threshold: threshold.to_string(), passed }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub regime: Option<Classification>,
    pub growth: Vec<GrowthReport>,
    pub bands: Vec<Band>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl Report {
    pub const CSV_HEADER: &'static str = "experiment,p,q,s,d,scale,value,log2_value";

    pub fn csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.experiment,
                fmt_f64(r.p),
                fmt_f64(r.q),
                fmt_f64(r.s),
                r.d,
                fmt_f64(r.scale),
                fmt_f64(r.value),
                fmt_f64(r.log2_value)
            );
        }
        out
    }

    pub fn json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)? + "\n")
    }

    /// Writes `PREFIX.csv` and `PREFIX.json`.
    pub fn write(&self, prefix: &Path) -> Result<()> {
        let mut csv = prefix.as_os_str().to_owned();
        csv.push(".csv");
        let mut json = prefix.as_os_str().to_owned();
        json.push(".json");
        std::fs::write(csv, self.csv())?;
        std::fs::write(json, self.json()?)?;
        Ok(())
    }
}

struct Builder<'a> {
    cfg: &'a ExperimentConfig,
    rows: Vec<Row>,
    growth: Vec<GrowthReport>,
    bands: Vec<Band>,
    checks: Vec<Check>,
}

impl<'a> Builder<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self { cfg, rows: Vec::new(), growth: Vec::new(), bands: Vec::new(), checks: Vec::new() }
    }

    fn series(&mut self, name: &str, prm: (f64, f64, f64, usize), points: &[(f64, f64)]) {
        for &(scale, value) in points {
            self.rows.push(Row {
                experiment: name.to_string(),
                p: prm.0,
                q: prm.1,
                s: prm.2,
                d: prm.3,
                scale,
                value,
                log2_value: value.log2(),
            });
        }
    }

    fn own(&self) -> (f64, f64, f64, usize) {
        (self.cfg.p, self.cfg.q, self.cfg.s, self.cfg.d)
    }

    fn finish(self, regime: Option<Classification>) -> Report {
        let passed = self.checks.iter().all(|c| c.passed);
        Report {
            rows: self.rows,
            summary: Summary {
                schema: SCHEMA_VERSION,
                experiment: self.cfg.experiment,
                config: self.cfg.clone(),
                regime,
                growth: self.growth,
                bands: self.bands,
                checks: self.checks,
                passed,
            },
        }
    }
}

fn on_critical_line(prm: &BesovParams) -> bool {
    let crit = prm.critical_smoothness();
    (prm.s - crit).abs() <= LINE_TOL * crit.abs().max(1.0)
}

fn scale_range(lo: u32, hi: u32, what: &str) -> Result<std::ops::RangeInclusive<u32>> {
    if lo > hi {
        return param_err(format!("empty {what} range {lo}..={hi}"));
    }
    Ok(lo..=hi)
}

/// Ratios `numerator(f)/a_norm(f)` over seeded random functions, one
/// `(level, ratio)` pair per instance, in level-then-sample order.
fn random_ratios<F>(cfg: &ExperimentConfig, prm: &BesovParams, numerator: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&crate::dyadic::DyadicStepFunction) -> Result<f64> + Sync,
{
    if cfg.samples == 0 {
        return param_err("at least one sample is required");
    }
    let jobs: Vec<(u32, usize)> = scale_range(cfg.m_min, cfg.m_max, "level")?
        .flat_map(|m| (0..cfg.samples).map(move |i| (m, i)))
        .collect();
    jobs.par_iter()
        .map(|&(m, i)| {
            let seed = derive_seed(cfg.seed, ((m as u64) << 32) | i as u64);
            let f = random_step(seed, cfg.d, m, cfg.distribution)?;
            Ok((m as f64, numerator(&f)? / a_norm(&f, prm)?))
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.experiment {
        Experiment::Equivalence => run_equivalence(cfg),
        Experiment::ModulusVsApprox => run_modulus(cfg),
        Experiment::TrivialDual => run_trivial_dual(cfg),
        Experiment::UncondFail => run_uncond_fail(cfg),
        Experiment::BasisFail => run_basis_fail(cfg),
        Experiment::TensorFail => run_tensor_fail(cfg),
        Experiment::ClassifySweep => run_classify_sweep(cfg),
    }
}

fn run_equivalence(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    let lower = prm.critical_smoothness().max(0.0);
    if !(prm.s > lower) {
        return param_err(format!("equivalence needs max(d(1/p-1), 0) < s < 1/p, got s = {}", prm.s));
    }
    let pts = random_ratios(cfg, &prm, |f| lqlp_norm(&analyze(f), &prm))?;
    let mut b = Builder::new(cfg);
    b.series("equivalence", b.own(), &pts);
    let band = Band::new("lqlp_over_a_norm", &pts)?;
    b.checks.push(check("band max/min", band.max_over_min, "<= 50", band.max_over_min <= 50.0));
    b.checks.push(check("log2 ratio slope vs m", band.log2_slope, "|.| <= 0.05", band.log2_slope.abs() <= 0.05));
    b.bands.push(band);
    Ok(b.finish(classify(&prm, System::Isotropic).ok()))
}

fn run_modulus(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    prm.require_finite_q()?;
    let pts = random_ratios(cfg, &prm, |f| b_norm_from_profile(f, &ModulusProfile::new(f, prm.p)?, &prm))?;
    let mut b = Builder::new(cfg);
    b.series("modulus-vs-approx", b.own(), &pts);
    let band = Band::new("b_norm_over_a_norm", &pts)?;
    b.checks.push(check("band max/min", band.max_over_min, "<= 100", band.max_over_min <= 100.0));
    b.checks.push(check("log2 ratio slope vs m", band.log2_slope, "|.| <= 0.05", band.log2_slope.abs() <= 0.05));
    b.bands.push(band);
    Ok(b.finish(classify(&prm, System::Isotropic).ok()))
}

fn run_trivial_dual(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    let crit = prm.critical_smoothness();
    let below = prm.s < crit && !on_critical_line(&prm);
    if !(prm.p < 1.0 && (below || (on_critical_line(&prm) && prm.q > 1.0))) {
        return param_err("trivial-dual needs p < 1 and s < d(1/p-1), or s = d(1/p-1) with q > 1");
    }
    let levels: Vec<u32> = scale_range(cfg.m_min, cfg.m_max, "level")?.collect();
    let norms = levels
        .par_iter()
        .map(|&m| nested_closed_form(&NestedSpec::new(cfg.d, m, CoefficientRule::TrivialDual), &prm))
        .collect::<Result<Vec<_>>>()?;
    let a: Vec<(f64, f64)> = levels.iter().zip(&norms).map(|(&m, n)| (m as f64, n.a_norm)).collect();
    let l1: Vec<(f64, f64)> = levels
        .iter()
        .zip(&norms)
        .map(|(&m, n)| (m as f64, n.l1_norm / ((m + 2) as f64).ln()))
        .collect();
    let mut b = Builder::new(cfg);
    b.series("trivial-dual/a_norm", b.own(), &a);
    b.series("trivial-dual/l1_over_log", b.own(), &l1);
    let band = Band::new("a_norm", &a)?;
    let l1_band = Band::new("l1_over_log", &l1)?;
    b.checks.push(check("a_norm max/min", band.max_over_min, "<= 2", band.max_over_min <= 2.0));
    b.checks.push(check("l1/ln(m+2) min", l1_band.min, ">= 0.2", l1_band.min >= 0.2));
    b.checks.push(check("l1/ln(m+2) max", l1_band.max, "<= 5", l1_band.max <= 5.0));
    b.bands.push(band);
    b.bands.push(l1_band);
    Ok(b.finish(classify(&prm, System::Isotropic).ok()))
}

fn run_uncond_fail(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    if !(on_critical_line(&prm) && prm.q <= prm.p && prm.p < 1.0) {
        return param_err("uncond-fail needs s = d(1/p-1) and q <= p < 1");
    }
    let levels: Vec<u32> = scale_range(cfg.m_min, cfg.m_max, "level")?.collect();
    let f_norms = levels
        .par_iter()
        .map(|&m| a_norm(&spike(cfg.d, m)?, &prm).map(|a| (m as f64, a)))
        .collect::<Result<Vec<_>>>()?;
    let ks: Vec<u32> = scale_range(cfg.k_min, cfg.k_max, "k")?.collect();
    let g_norms = ks
        .par_iter()
        .map(|&k| {
            let n = nested_closed_form(&NestedSpec::new(cfg.d, 2 * k, CoefficientRule::Alternating), &prm)?;
            Ok((k as f64, n.a_norm.powf(prm.q)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = Builder::new(cfg);
    b.series("uncond-fail/a_norm_f", b.own(), &f_norms);
    b.series("uncond-fail/a_norm_g_pow_q", b.own(), &g_norms);
    let band = Band::new("a_norm_f", &f_norms)?;
    let growth = GrowthReport::new("a_norm_g_pow_q", &g_norms, false, None)?;
    b.checks.push(check("a_norm(f_m) max/min", band.max_over_min, "<= 2", band.max_over_min <= 2.0));
    b.checks.push(check("a_norm(g_2k)^q slope", growth.slope, "> 0", growth.slope > 0.0));
    b.checks.push(check("a_norm(g_2k)^q r2", growth.r2, "> 0.9", growth.r2 > 0.9));
    b.bands.push(band);
    b.growth.push(growth);
    Ok(b.finish(classify(&prm, System::Isotropic).ok()))
}

fn run_basis_fail(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    let d = cfg.d as f64;
    if !(on_critical_line(&prm) && prm.p < prm.q && prm.q <= 1.0 && prm.p > (d - 1.0) / d) {
        return param_err("basis-fail needs s = d(1/p-1) and (d-1)/d < p < q <= 1");
    }
    let alpha = cfg.alpha.unwrap_or(1.0 / (2.0 * prm.q));
    if !(alpha < 1.0 / prm.q) {
        return param_err("alpha must be below 1/q");
    }
    let ks: Vec<u32> = scale_range(cfg.k_min, cfg.k_max, "k")?.collect();
    let pts = ks
        .par_iter()
        .map(|&k| scattered_closed_norms(&ScatteredSpec::new(k, cfg.d, alpha), &prm).map(|n| (k as f64, n.ratio)))
        .collect::<Result<Vec<_>>>()?;
    let theory = d * (1.0 / prm.p - 1.0 / prm.q);
    grow_report(cfg, "basis-fail", &pts, theory, classify(&prm, System::Isotropic).ok())
}

fn run_tensor_fail(cfg: &ExperimentConfig) -> Result<Report> {
    let prm = cfg.params()?;
    if !(cfg.d >= 2 && prm.p < 1.0) {
        return param_err("tensor-fail needs d >= 2 and p < 1");
    }
    let ks: Vec<u32> = scale_range(cfg.k_min, cfg.k_max, "k")?.collect();
    let pts = ks
        .par_iter()
        .map(|&k| tensor_spike_pair(k, cfg.d, &prm).map(|t| (k as f64, t.ratio)))
        .collect::<Result<Vec<_>>>()?;
    let theory = (1.0 / prm.p - 1.0) * (cfg.d as f64 - 1.0);
    grow_report(cfg, "tensor-fail", &pts, theory, classify(&prm, System::Tensor).ok())
}

fn grow_report(
    cfg: &ExperimentConfig,
    name: &str,
    pts: &[(f64, f64)],
    theory: f64,
    regime: Option<Classification>,
) -> Result<Report> {
    let mut b = Builder::new(cfg);
    b.series(name, b.own(), pts);
    let growth = GrowthReport::new("log2_ratio", pts, true, Some(theory))?;
    let dev = growth.relative_deviation.unwrap_or(f64::INFINITY);
    b.checks.push(check("slope relative deviation", dev, "<= 0.2", dev <= 0.2));
    b.growth.push(growth);
    Ok(b.finish(regime))
}

/// The four reference classifications: parameters, system and expected regime.
pub fn reference_classifications() -> [((f64, f64, f64, usize), System, Regime); 4] {
    [
        ((0.8, 0.8, 0.25, 1), System::Isotropic, Regime::ConditionalBasis),
        ((0.5, 2.0, 2.0, 2), System::Isotropic, Regime::NotBasisTrivialDual),
        ((0.5, 1.0, 1.0, 2), System::Tensor, Regime::NotBasisTensor),
        ((2.0, 0.7, 0.3, 3), System::Isotropic, Regime::UnconditionalBasis),
    ]
}

/// Lattice of `25 x 20 x 10 x 2 = 10^4` admissible parameter points.
pub fn sweep_lattice() -> Vec<BesovParams> {
    let mut out = Vec::with_capacity(10_000);
    for ip in 0..25 {
        let p = 0.2 + 0.1 * ip as f64;
        for iq in 0..20 {
            let q = 0.25 * (iq + 1) as f64;
            for is in 0..10 {
                let s = is as f64 / 10.0 / p;
                for d in 1..=2 {
                    out.push(BesovParams::new(p, q, s, d).expect("lattice point is admissible"));
                }
            }
        }
    }
    out
}

fn run_classify_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let mut b = Builder::new(cfg);
    let mut matches = 0;
    for (i, ((p, q, s, d), sys, expected)) in reference_classifications().into_iter().enumerate() {
        let prm = BesovParams::unrestricted(p, q, s, d)?;
        let got = classify(&prm, sys)?;
        if got.regime == expected {
            matches += 1;
        }
        b.series("classify-sweep/reference", (p, q, s, d), &[((i + 1) as f64, got.regime.code() as f64)]);
    }
    let lattice = sweep_lattice();
    let mut unclassified = 0usize;
    let mut counts = [0usize; 6];
    for prm in &lattice {
        for sys in [System::Isotropic, System::Tensor] {
            match classify(prm, sys) {
                Ok(c) => counts[c.regime.code() as usize] += 1,
                Err(_) => unclassified += 1,
            }
        }
    }
    for (code, &n) in counts.iter().enumerate() {
        b.series("classify-sweep/count", b.own(), &[(code as f64, n as f64)]);
    }
    b.checks.push(check("reference examples matched", matches as f64, "== 4", matches == 4));
    b.checks.push(check("unclassified lattice points", unclassified as f64, "== 0", unclassified == 0));
    Ok(b.finish(None))
}
