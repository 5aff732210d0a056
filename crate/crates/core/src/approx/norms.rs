use rayon::prelude::*;

use super::best_constant::best_constant_error;
use super::BesovParams;
use crate::dyadic::{lp_quasinorm, DyadicStepFunction, StepFunction};
use crate::error::{param_err, Result};
use crate::haar::analyze;
use crate::numeric::{compensated_sum, log2_sum, CompensatedSum};

/// Cube counts above which per-cube problems are solved in parallel.
const PARALLEL_CUBES: usize = 256;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        param_err(format!("p must be positive and finite, got {p}"))
    }
}

/// `E_k(f)_p^p`: sum of per-cube best-constant errors over the level-`k`
/// cubes on which `f` is not constant.
pub fn approx_error_pow<F: StepFunction + Sync + ?Sized>(f: &F, k: u32, p: f64) -> Result<f64> {
    check_p(p)?;
    let cubes = f.nonconstant_cubes(k);
    let one = |c: &crate::dyadic::DyadicCube| -> f64 {
        best_constant_error(&f.value_histogram(c), p).map_or(0.0, |r| r.1)
    };
    let errs: Vec<f64> = if cubes.len() > PARALLEL_CUBES {
        cubes.par_iter().map(one).collect()
    } else {
        cubes.iter().map(one).collect()
    };
    Ok(compensated_sum(errs))
}

/// `E_k(f)_p`, the `L_p` distance from `f` to `S_k^d`.
pub fn approx_error<F: StepFunction + Sync + ?Sized>(f: &F, k: u32, p: f64) -> Result<f64> {
    Ok(approx_error_pow(f, k, p)?.powf(1.0 / p))
}

/// `log2 E_k(f)_p^p` for `k = 0..L`, where `L` is the finest level of `f`
/// (all later errors vanish).
pub fn approx_errors_log2<F: StepFunction + Sync + ?Sized>(f: &F, p: f64) -> Result<Vec<f64>> {
    (0..f.finest_level())
        .map(|k| approx_error_pow(f, k, p).map(f64::log2))
        .collect()
}

/// `log2` of `(||f||_p^q + sum_k (2^(ks) E_k)^q)^(1/q)`, from `log2 ||f||_p^p`
/// and the values `log2 E_k^p`.
pub fn log2_a_norm_from_log2(log2_lp_pow: f64, log2_err_pows: &[f64], prm: &BesovParams) -> Result<f64> {
    prm.require_finite_q()?;
    let r = prm.q / prm.p;
    let mut terms = Vec::with_capacity(log2_err_pows.len() + 1);
    terms.push(r * log2_lp_pow);
    for (k, &e) in log2_err_pows.iter().enumerate() {
        terms.push(prm.q * k as f64 * prm.s + r * e);
    }
    Ok(log2_sum(&terms) / prm.q)
}

/// `(||f||_p^q + sum_k (2^(ks) E_k)^q)^(1/q)` from `log2 ||f||_p^p` and the
/// values `log2 E_k^p`, evaluated in the log domain.
pub fn a_norm_from_log2(log2_lp_pow: f64, log2_err_pows: &[f64], prm: &BesovParams) -> Result<f64> {
    Ok(log2_a_norm_from_log2(log2_lp_pow, log2_err_pows, prm)?.exp2())
}

/// The approximation quasi-norm `||f||_{A^s_{p,q,1}}`.
pub fn a_norm<F: StepFunction + Sync + ?Sized>(f: &F, prm: &BesovParams) -> Result<f64> {
    prm.require_finite_q()?;
    if f.dim() != prm.d {
        return param_err("dimension of f and parameters differ");
    }
    let errs = approx_errors_log2(f, prm.p)?;
    a_norm_from_log2(f.log2_lp_norm_pow(prm.p), &errs, prm)
}

/// `||f - P_k f||_{L_p}`.
pub fn projection_error(f: &DyadicStepFunction, k: u32, p: f64) -> Result<f64> {
    let pk = f.average_project(k);
    let diff = DyadicStepFunction::linear_combination(1.0, f, -1.0, &pk)?;
    lp_quasinorm(&diff, p)
}

/// Squared Haar square function on the cells of `f`:
/// `lambda_scaling^2 + sum_h lambda_h^2 chi_{supp h}`.
fn square_function_sq(f: &DyadicStepFunction) -> Vec<f64> {
    let d = f.dim();
    let c = analyze(f);
    let per = (1usize << d) - 1;
    let mut cur = vec![c.scaling() * c.scaling()];
    for k in 1..=f.level() {
        let lam = c.level(k);
        let parent_sq: Vec<f64> = cur
            .iter()
            .enumerate()
            .map(|(pf, &s)| s + lam[pf * per..(pf + 1) * per].iter().map(|x| x * x).sum::<f64>())
            .collect();
        // Every level-k cell inherits the value of its parent.
        let coarse = DyadicStepFunction::new(d, k - 1, parent_sq).expect("shape");
        cur = coarse.refine(k).expect("within budget").into_values();
    }
    cur
}

/// `||(sum_h lambda_h^2 chi_{supp h})^(1/2)||_{L_p}`, scaling term included.
pub fn square_function_norm(f: &DyadicStepFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let s: Vec<f64> = square_function_sq(f).into_iter().map(f64::sqrt).collect();
    lp_quasinorm(&DyadicStepFunction::new(f.dim(), f.level(), s)?, p)
}

/// `(sum_k sum_{h in H_k} (k+1) mu(supp h) lambda_h^2)^(1/2)`.
pub fn b0_221_weighted_sum(f: &DyadicStepFunction) -> f64 {
    let c = analyze(f);
    let mut acc = CompensatedSum::new();
    for (k, lv) in c.levels().iter().enumerate() {
        let mu = if k == 0 {
            1.0
        } else {
            (-(((k - 1) * f.dim()) as f64)).exp2()
        };
        let w = (k + 1) as f64 * mu;
        for &l in lv {
            acc.add(w * l * l);
        }
    }
    acc.value().sqrt()
}
