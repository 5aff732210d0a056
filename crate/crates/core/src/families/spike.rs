use super::nested::{nested_family, CoefficientRule, NestedSpec};
use super::require_p_at_most_one;
use crate::approx::BesovParams;
use crate::dyadic::{DyadicCube, LogCoefficient, SparseStepFunction};
use crate::error::{param_err, Result};

/// `f_m = 2^(md) chi_{[0, 2^-m)^d}`.
pub fn spike(d: usize, m: u32) -> Result<SparseStepFunction> {
    let mut f = SparseStepFunction::new(d)?;
    f.push(DyadicCube::lower_corner(d, m), LogCoefficient::from_log2(1, (m as usize * d) as f64));
    Ok(f)
}

/// `g_{2k} = sum_{l=0}^{2k} (-1)^l 2^(ld) chi_{[0,2^-l)^d}`, the sum of the
/// even Haar blocks `0, 2, ..., 2k` of any spike `f_m` with `m >= 2k`.
pub fn alternating_partial(d: usize, k: u32) -> Result<SparseStepFunction> {
    nested_family(&NestedSpec::new(d, 2 * k, CoefficientRule::Alternating))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpikePair {
    pub f: SparseStepFunction,
    /// `g[k] = g_{2k}` for `2k <= m`.
    pub g: Vec<SparseStepFunction>,
}

pub fn spike_pair(m: u32, d: usize) -> Result<SpikePair> {
    Ok(SpikePair {
        f: spike(d, m)?,
        g: (0..=m / 2).map(|k| alternating_partial(d, k)).collect::<Result<_>>()?,
    })
}

/// `(log2 ||f_m||_p^p, [log2 E_k(f_m)_p^p; k < m])` for `p <= 1`; every
/// error equals the norm because zero is the best constant on each cube.
pub fn spike_closed_form(d: usize, m: u32, prm: &BesovParams) -> Result<(f64, Vec<f64>)> {
    require_p_at_most_one(prm.p)?;
    if prm.d != d {
        return param_err("dimension of the family and parameters differ");
    }
    let lp = (m as usize * d) as f64 * (prm.p - 1.0);
    Ok((lp, vec![lp; m as usize]))
}
