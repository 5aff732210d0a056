use serde::Serialize;

use super::require_p_at_most_one;
use crate::approx::{log2_a_norm_from_log2, BesovParams};
use crate::dyadic::{DyadicCube, SparseStepFunction};
use crate::error::{param_err, Error, Result};
use crate::haar::TensorHaarIndex;

/// `f_k = chi_{[0,2^-k)^d}` and its rank-one projection onto
/// `theta_k = h_{[0,2^-(k-1))} (x) chi_I (x) ... (x) chi_I`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorSpike {
    #[serde(skip)]
    pub f: SparseStepFunction,
    #[serde(skip)]
    pub theta: TensorHaarIndex,
    /// `<f_k, theta_k> / <theta_k, theta_k> = 2^(k-1-kd)`.
    pub coefficient: f64,
    pub log2_lp_pow: f64,
    pub log2_err_pows: Vec<f64>,
    pub log2_lp_pow_projection: f64,
    pub log2_err_pows_projection: Vec<f64>,
    pub a_norm: f64,
    pub a_norm_projection: f64,
    pub ratio: f64,
    pub log2_ratio: f64,
}

/// Closed forms for `p <= 1`: `E_l(f_k)_p = ||f_k||_p` for `l < k`;
/// `E_l(theta_k)_p = ||theta_k||_p` for `l < k-1` and
/// `E_{k-1}(theta_k)_p = 2^(1-1/p) ||theta_k||_p`, with `||theta_k||_p^p = 2^(1-k)`.
pub fn tensor_spike_pair(k: u32, d: usize, prm: &BesovParams) -> Result<TensorSpike> {
    if d < 2 {
        return Err(Error::Unsupported("the tensor spike needs d >= 2".into()));
    }
    if k == 0 {
        return param_err("the tensor spike needs k >= 1");
    }
    if prm.d != d {
        return param_err("dimension of the family and parameters differ");
    }
    require_p_at_most_one(prm.p)?;
    let p = prm.p;
    let mut f = SparseStepFunction::new(d)?;
    f.push_f64(DyadicCube::lower_corner(d, k), 1.0);
    let mut n = vec![1u64; d];
    n[0] = (1u64 << (k - 1)) + 1;
    let theta = TensorHaarIndex(n);

    let kd = (k as usize * d) as f64;
    let log2_coef = k as f64 - 1.0 - kd;
    let log2_lp_pow = -kd;
    let log2_err_pows = vec![log2_lp_pow; k as usize];
    let theta_pow = 1.0 - k as f64;
    let log2_lp_pow_projection = p * log2_coef + theta_pow;
    let mut log2_err_pows_projection = vec![log2_lp_pow_projection; k as usize];
    log2_err_pows_projection[k as usize - 1] = p * log2_coef + p - k as f64;

    let la = log2_a_norm_from_log2(log2_lp_pow, &log2_err_pows, prm)?;
    let lb = log2_a_norm_from_log2(log2_lp_pow_projection, &log2_err_pows_projection, prm)?;
    Ok(TensorSpike {
        f,
        theta,
        coefficient: log2_coef.exp2(),
        log2_lp_pow,
        log2_err_pows,
        log2_lp_pow_projection,
        log2_err_pows_projection,
        a_norm: la.exp2(),
        a_norm_projection: lb.exp2(),
        ratio: (lb - la).exp2(),
        log2_ratio: lb - la,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_d1() {
        let prm = BesovParams::new(0.5, 1.0, 1.0, 1).unwrap();
        assert!(matches!(tensor_spike_pair(2, 1, &prm), Err(Error::Unsupported(_))));
    }

    #[test]
    fn theta_error_at_k_minus_one() {
        let prm = BesovParams::new(0.5, 1.0, 1.0, 2).unwrap();
        for k in 1..6u32 {
            let t = tensor_spike_pair(k, 2, &prm).unwrap();
            let e = (t.log2_err_pows_projection[k as usize - 1] / prm.p).exp2() / t.coefficient;
            assert!((e - 2.0 * (-(k as f64) / prm.p).exp2()).abs() < 1e-15 * e.max(1.0));
        }
    }
}
