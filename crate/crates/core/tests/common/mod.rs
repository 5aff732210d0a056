#![allow(dead_code)]

use haar_besov::dyadic::{DyadicCube, DyadicStepFunction, SparseStepFunction};
use haar_besov::experiments::{random_step, rng_from_seed, Distribution};
use rand::Rng;

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn uniform(seed: u64, d: usize, m: u32) -> DyadicStepFunction {
    random_step(seed, d, m, Distribution::Uniform).unwrap()
}

/// Small integer values, so that averaging is exact in floating point.
pub fn integer_step(seed: u64, d: usize, m: u32) -> DyadicStepFunction {
    let mut rng = rng_from_seed(seed);
    DyadicStepFunction::from_fn(d, m, |_| rng.gen_range(-8i32..=8) as f64).unwrap()
}

/// Random atoms with integer coefficients on cubes of level at most `max_level`.
pub fn random_sparse(seed: u64, d: usize, max_level: u32, atoms: usize) -> SparseStepFunction {
    let mut rng = rng_from_seed(seed);
    let mut f = SparseStepFunction::new(d).unwrap();
    for _ in 0..atoms {
        let level = rng.gen_range(0..=max_level);
        let index = (0..d).map(|_| rng.gen_range(0..1u64 << level)).collect();
        let c = rng.gen_range(-4i32..=4) as f64;
        f.push_f64(DyadicCube::new(level, index).unwrap(), c);
    }
    f
}

/// Inner product of two functions at the same level.
pub fn inner(f: &DyadicStepFunction, g: &DyadicStepFunction) -> f64 {
    f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>() * f.cell_measure()
}

use haar_besov::approx::{a_norm, approx_errors_log2, BesovParams};
use haar_besov::dyadic::StepFunction;
use haar_besov::families::{
    nested_closed_form, nested_family, scattered, scattered_closed_norms, scattered_projection, spike,
    spike_closed_form, tensor_spike_pair, CoefficientRule, NestedSpec, ScatteredSpec,
};
use haar_besov::haar::rank_one_project;

/// One closed-form quantity next to its value from the densified pipeline.
pub struct Comparison {
    pub label: String,
    pub closed: f64,
    pub pipeline: f64,
}

fn push_log2(out: &mut Vec<Comparison>, label: String, closed_log2: f64, pipeline_log2: f64) {
    out.push(Comparison { label, closed: closed_log2.exp2(), pipeline: pipeline_log2.exp2() });
}

fn push_profile<F: StepFunction + Sync>(
    out: &mut Vec<Comparison>,
    label: &str,
    f: &F,
    prm: &BesovParams,
    log2_lp: f64,
    log2_errs: &[f64],
    a: f64,
) {
    let errs = approx_errors_log2(f, prm.p).unwrap();
    push_log2(out, format!("{label} lp"), log2_lp, f.log2_lp_norm_pow(prm.p));
    for (k, e) in errs.iter().enumerate() {
        let closed = log2_errs.get(k).copied().unwrap_or(f64::NEG_INFINITY);
        push_log2(out, format!("{label} E_{k}"), closed, *e);
    }
    for (k, &e) in log2_errs.iter().enumerate().skip(errs.len()) {
        push_log2(out, format!("{label} E_{k}"), e, f64::NEG_INFINITY);
    }
    out.push(Comparison { label: format!("{label} a_norm"), closed: a, pipeline: a_norm(f, prm).unwrap() });
}

/// Every closed-form evaluator against the densified pipeline on all
/// instances with `d <= 2` and total level at most 12.
pub fn closed_form_comparisons() -> Vec<Comparison> {
    let mut out = Vec::new();
    let lattice = [(0.5, 0.5), (0.7, 1.0), (0.8, 0.8), (0.9, 2.0), (1.0, 1.0)];
    for d in 1..=2usize {
        let mmax = 12 / d as u32;
        for &(p, q) in &lattice {
            let crit = d as f64 * (1.0 / p - 1.0);
            for s in [0.5 * crit, crit, 0.5 * (crit + 1.0 / p)] {
                let Ok(prm) = BesovParams::new(p, q, s, d) else { continue };
                for m in [1, mmax / 2, mmax] {
                    let f = spike(d, m).unwrap().densify(m).unwrap();
                    let (lp, errs) = spike_closed_form(d, m, &prm).unwrap();
                    let a = haar_besov::approx::a_norm_from_log2(lp, &errs, &prm).unwrap();
                    push_profile(&mut out, &format!("spike d={d} m={m} p={p} q={q} s={s:.3}"), &f, &prm, lp, &errs, a);
                    let explicit: Vec<f64> = (0..=m).map(|l| ((l * 7 + 3) % 5) as f64 - 2.0).collect();
                    for rule in [CoefficientRule::TrivialDual, CoefficientRule::Alternating, CoefficientRule::Explicit(explicit)] {
                        let spec = NestedSpec::new(d, m, rule.clone());
                        let f = nested_family(&spec).unwrap().densify(m).unwrap();
                        let n = nested_closed_form(&spec, &prm).unwrap();
                        let label = format!("nested {rule:?} d={d} m={m} p={p} q={q} s={s:.3}");
                        push_profile(&mut out, &label, &f, &prm, n.log2_lp_pow, &n.log2_err_pows, n.a_norm);
                        let l1 = f.lp_norm_pow(1.0);
                        out.push(Comparison { label: format!("{label} l1"), closed: n.l1_norm, pipeline: l1 });
                    }
                }
            }
        }
    }
    for (p, q, d) in [(0.7, 1.0, 1usize), (0.8, 1.0, 2), (0.5, 0.9, 1), (0.9, 1.0, 2)] {
        let prm = BesovParams::new(p, q, d as f64 * (1.0 / p - 1.0), d).unwrap();
        for k in 1..=4u32 {
            let spec = ScatteredSpec::new(k, d, 1.0 / (2.0 * q));
            let n_cubes = spec.count().unwrap();
            if k as u64 + n_cubes > 12 {
                continue;
            }
            let deep = k + n_cubes as u32;
            let f = scattered(&spec).unwrap().densify(deep).unwrap();
            let n = scattered_closed_norms(&spec, &prm).unwrap();
            let label = format!("scattered k={k} d={d} p={p} q={q}");
            push_profile(&mut out, &label, &f, &prm, n.log2_lp_pow, &n.log2_err_pows, n.a_norm);
            let pf = scattered_projection(&spec).unwrap();
            let (lp, errs) = (n.log2_lp_pow_projection, n.log2_err_pows_projection.clone());
            push_profile(&mut out, &format!("{label} projection"), &pf, &prm, lp, &errs, n.a_norm_projection);
        }
    }
    for (p, q, d) in [(0.5, 1.0, 2usize), (0.7, 0.5, 2), (0.9, 2.0, 2)] {
        let prm = BesovParams::new(p, q, 0.5 / p, d).unwrap();
        for k in 1..=6u32 {
            let t = tensor_spike_pair(k, d, &prm).unwrap();
            let f = t.f.densify(k).unwrap();
            let label = format!("tensor spike k={k} p={p} q={q}");
            push_profile(&mut out, &label, &f, &prm, t.log2_lp_pow, &t.log2_err_pows, t.a_norm);
            let pf = rank_one_project(&f, &t.theta).unwrap();
            let (lp, errs) = (t.log2_lp_pow_projection, t.log2_err_pows_projection.clone());
            push_profile(&mut out, &format!("{label} projection"), &pf, &prm, lp, &errs, t.a_norm_projection);
        }
    }
    out
}
