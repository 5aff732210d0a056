//! Weighted `l_q(l_p)` and `l_inf(l_p)` norms of Haar coefficient blocks.

use serde::Serialize;

use crate::approx::BesovParams;
use crate::error::{param_err, Result};
use crate::haar::HaarCoefficients;
use crate::numeric::log2_sum;

/// `log2 sum_{h in H_k} |lambda_h|^p` for every block `k` (`-inf` for empty blocks).
pub fn level_log2_sums(c: &HaarCoefficients, p: f64) -> Vec<f64> {
    c.levels()
        .iter()
        .map(|lv| {
            let logs: Vec<f64> = lv.iter().filter(|&&v| v != 0.0).map(|v| p * v.abs().log2()).collect();
            log2_sum(&logs)
        })
        .collect()
}

/// `(sum_k (2^(k(sp-d)) sum_{h in H_k} |lambda_h|^p)^(q/p))^(1/q)` from the
/// block sums `log2 sum |lambda_h|^p`.
pub fn lqlp_from_level_sums(log2_sums: &[f64], prm: &BesovParams) -> Result<f64> {
    prm.require_finite_q()?;
    let d = prm.d as f64;
    let terms: Vec<f64> = log2_sums
        .iter()
        .enumerate()
        .map(|(k, &l)| prm.q / prm.p * (k as f64 * (prm.s * prm.p - d) + l))
        .collect();
    Ok((log2_sum(&terms) / prm.q).exp2())
}

pub fn lqlp_norm(c: &HaarCoefficients, prm: &BesovParams) -> Result<f64> {
    if c.dim() != prm.d {
        return param_err("dimension of coefficients and parameters differ");
    }
    lqlp_from_level_sums(&level_log2_sums(c, prm.p), prm)
}

/// The `l_inf(l_p)` norm with the weighted value of every block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinfReport {
    pub sup: f64,
    pub per_level: Vec<f64>,
}

/// `sup_k 2^(k(s-d/p)) (sum_{h in H_k} |lambda_h|^p)^(1/p)`; needs `q = inf`.
pub fn linf_lp_norm(c: &HaarCoefficients, prm: &BesovParams) -> Result<LinfReport> {
    if prm.q.is_finite() {
        return param_err("the l_inf(l_p) norm needs q = inf");
    }
    if c.dim() != prm.d {
        return param_err("dimension of coefficients and parameters differ");
    }
    let d = prm.d as f64;
    let per_level: Vec<f64> = level_log2_sums(c, prm.p)
        .into_iter()
        .enumerate()
        .map(|(k, l)| (k as f64 * (prm.s - d / prm.p) + l / prm.p).exp2())
        .collect();
    let sup = per_level.iter().copied().fold(0.0, f64::max);
    Ok(LinfReport { sup, per_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicCube;
    use crate::haar::HaarIndex;

    #[test]
    fn single_coefficients() {
        let prm = BesovParams::new(0.7, 1.5, 0.4, 2).unwrap();
        let inf = BesovParams::new(0.7, f64::INFINITY, 0.4, 2).unwrap();
        let mut c = HaarCoefficients::zeros(2, 3).unwrap();
        c.set(&HaarIndex::Scaling, -2.0).unwrap();
        assert!((lqlp_norm(&c, &prm).unwrap() - 2.0).abs() < 1e-14);
        assert!((linf_lp_norm(&c, &inf).unwrap().sup - 2.0).abs() < 1e-14);

        let mut c = HaarCoefficients::zeros(2, 3).unwrap();
        let parent = DyadicCube::new(2, vec![1, 3]).unwrap();
        c.set(&HaarIndex::wavelet(parent, 1).unwrap(), 5.0).unwrap();
        let expect = 5.0 * (3.0f64 * (0.4 - 2.0 / 0.7)).exp2();
        assert!((lqlp_norm(&c, &prm).unwrap() / expect - 1.0).abs() < 1e-13);
        let r = linf_lp_norm(&c, &inf).unwrap();
        assert!((r.sup / expect - 1.0).abs() < 1e-13);
        assert!(linf_lp_norm(&c, &prm).is_err());
    }
}
