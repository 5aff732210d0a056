use serde::{Deserialize, Serialize};

use super::require_p_at_most_one;
use crate::approx::{a_norm_from_log2, BesovParams};
use crate::dyadic::{check_dim, DyadicCube, LogCoefficient, SparseStepFunction, MAX_LEVEL};
use crate::error::{param_err, Error, Result};
use crate::numeric::{log2_sum, CompensatedSum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientRule {
    /// `a_k = 2^(kd) / (k+1)`.
    TrivialDual,
    /// `a_k = (-1)^k 2^(kd)`.
    Alternating,
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeChain {
    /// `Delta_k = [0, 2^-k)^d`.
    LowerCorner,
    /// `Delta_0 ⊃ Delta_1 ⊃ ...`, one cube per level starting at level 0.
    Explicit(Vec<DyadicCube>),
}

/// `f_m = sum_{l=0}^m a_l chi_{Delta_l}` over a decreasing chain of cubes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedSpec {
    pub d: usize,
    pub m: u32,
    pub rule: CoefficientRule,
    pub chain: CubeChain,
}

impl NestedSpec {
    pub fn new(d: usize, m: u32, rule: CoefficientRule) -> Self {
        Self { d, m, rule, chain: CubeChain::LowerCorner }
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.d)?;
        if self.m > MAX_LEVEL {
            return param_err(format!("m = {} exceeds the maximum level {MAX_LEVEL}", self.m));
        }
        if let CoefficientRule::Explicit(a) = &self.rule {
            if a.len() != self.m as usize + 1 {
                return param_err("explicit rule needs m + 1 coefficients");
            }
        }
        if let CubeChain::Explicit(c) = &self.chain {
            if c.len() != self.m as usize + 1 {
                return param_err("explicit chain needs m + 1 cubes");
            }
            for (l, cube) in c.iter().enumerate() {
                if cube.dim() != self.d || cube.level() != l as u32 {
                    return param_err(format!("chain cube {l} must have level {l} and dimension {}", self.d));
                }
                if l > 0 && !c[l - 1].contains(cube) {
                    return param_err(format!("chain cube {l} is not inside cube {}", l - 1));
                }
            }
        }
        Ok(())
    }

    /// `a_l` for `l = 0..=m`.
    pub fn coefficients(&self) -> Vec<LogCoefficient> {
        let d = self.d as f64;
        (0..=self.m)
            .map(|l| match &self.rule {
                CoefficientRule::TrivialDual => LogCoefficient::from_log2(1, l as f64 * d - (l as f64 + 1.0).log2()),
                CoefficientRule::Alternating => {
                    LogCoefficient::from_log2(if l % 2 == 0 { 1 } else { -1 }, l as f64 * d)
                }
                CoefficientRule::Explicit(a) => LogCoefficient::from_f64(a[l as usize]),
            })
            .collect()
    }

    pub fn cube(&self, l: u32) -> DyadicCube {
        match &self.chain {
            CubeChain::LowerCorner => DyadicCube::lower_corner(self.d, l),
            CubeChain::Explicit(c) => c[l as usize].clone(),
        }
    }
}

pub fn nested_family(spec: &NestedSpec) -> Result<SparseStepFunction> {
    spec.validate()?;
    let mut f = SparseStepFunction::new(spec.d)?;
    for (l, a) in spec.coefficients().into_iter().enumerate() {
        f.push(spec.cube(l as u32), a);
    }
    Ok(f)
}

/// Exact norms of a nested family for `p <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedNorms {
    pub log2_lp_pow: f64,
    /// `log2 E_k(f_m)_p^p` for `k = 0..m` (all later errors vanish).
    pub log2_err_pows: Vec<f64>,
    pub lp_norm: f64,
    pub errors: Vec<f64>,
    pub l1_norm: f64,
    pub a_norm: f64,
}

/// Closed-form norms. On `Delta_n \ Delta_{n+1}` the function equals
/// `xi_n = a_0 + ... + a_n` (measure `(1-2^-d) 2^(-nd)`), and `xi_m` on
/// `Delta_m` (measure `2^(-md)`). On `Delta_k` the value `xi_k` covers at
/// least half of the cube, so it is the best constant and
/// `E_k^p = sum_{k<n} mu_n |xi_n - xi_k|^p`.
pub fn nested_closed_form(spec: &NestedSpec, prm: &BesovParams) -> Result<NestedNorms> {
    spec.validate()?;
    require_p_at_most_one(prm.p)?;
    if prm.d != spec.d {
        return param_err("dimension of the family and parameters differ");
    }
    let coeffs = spec.coefficients();
    if coeffs.iter().any(|c| c.log2mag > 1000.0) {
        return Err(Error::Unsupported("nested coefficients beyond double range".into()));
    }
    let a: Vec<f64> = coeffs.iter().map(LogCoefficient::to_f64).collect();
    let m = spec.m as usize;
    let d = spec.d as f64;
    let inner = (1.0 - (-d).exp2()).log2();
    let log_mu = |n: usize| if n == m { -(n as f64) * d } else { inner - n as f64 * d };
    // log2 sum_{n > from} mu_n |a_{from+1} + ... + a_n|^p, or all n when from is None.
    let tail = |from: Option<usize>, p: f64| -> f64 {
        let start = from.map_or(0, |k| k + 1);
        let mut partial = CompensatedSum::new();
        let mut logs = Vec::with_capacity(m + 1 - start);
        for (n, &an) in a.iter().enumerate().skip(start) {
            partial.add(an);
            let v = partial.value();
            if v != 0.0 {
                logs.push(log_mu(n) + p * v.abs().log2());
            }
        }
        log2_sum(&logs)
    };
    let p = prm.p;
    let log2_lp_pow = tail(None, p);
    let log2_err_pows: Vec<f64> = (0..m).map(|k| tail(Some(k), p)).collect();
    Ok(NestedNorms {
        log2_lp_pow,
        lp_norm: (log2_lp_pow / p).exp2(),
        errors: log2_err_pows.iter().map(|e| (e / p).exp2()).collect(),
        l1_norm: tail(None, 1.0).exp2(),
        a_norm: a_norm_from_log2(log2_lp_pow, &log2_err_pows, prm)?,
        log2_err_pows,
    })
}
