use serde::{Deserialize, Serialize};

use super::require_p_at_most_one;
use crate::approx::{log2_a_norm_from_log2, BesovParams};
use crate::dyadic::{check_dim, DyadicCube, DyadicStepFunction, LogCoefficient, SparseStepFunction, MAX_LEVEL};
use crate::error::{param_err, Error, Result};
use crate::numeric::log2_add;

/// Largest number of scattered cubes handled by the closed forms.
const MAX_SCATTERED: u64 = 1 << 20;

/// Which `2^(d-1)` children of every level-`(k-1)` cube form `T'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Children in the lower half along the first axis.
    FirstCoordinateLow,
    /// Children in the lower half along the last axis.
    LastCoordinateLow,
}

/// Where `Delta_i` sits inside `Delta'_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    LowerCorner,
    UpperCorner,
}

/// `f_k = sum_i b_i chi_{Delta_i}` with `b_i = 2^((k+i)d) i^-alpha`,
/// `Delta_i ⊂ Delta'_i` of level `k+i`, `Delta'_i` the `i`-th cube of `T'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteredSpec {
    pub k: u32,
    pub d: usize,
    pub alpha: f64,
    pub selection: Selection,
    pub placement: Placement,
}

impl ScatteredSpec {
    pub fn new(k: u32, d: usize, alpha: f64) -> Self {
        Self { k, d, alpha, selection: Selection::FirstCoordinateLow, placement: Placement::LowerCorner }
    }

    /// `|T'| = 2^(kd-1)`.
    pub fn count(&self) -> Result<u64> {
        check_dim(self.d)?;
        if self.k == 0 {
            return param_err("the scattered family needs k >= 1");
        }
        if !self.alpha.is_finite() {
            return param_err("alpha must be finite");
        }
        let bits = self.k as u64 * self.d as u64 - 1;
        if bits >= 20 || (1u64 << bits) > MAX_SCATTERED {
            return Err(Error::Capacity { required: 1u128 << bits.min(127), budget: MAX_SCATTERED });
        }
        Ok(1u64 << bits)
    }

    /// The cubes of `T'`, lexicographic over parents and then children.
    pub fn t_prime(&self) -> Result<Vec<DyadicCube>> {
        self.count()?;
        let d = self.d;
        let bit = match self.selection {
            Selection::FirstCoordinateLow => 1usize << (d - 1),
            Selection::LastCoordinateLow => 1,
        };
        Ok(DyadicCube::all(d, self.k - 1)
            .flat_map(|parent| {
                (0..1usize << d)
                    .filter(|b| b & bit == 0)
                    .map(|b| parent.child(b))
                    .collect::<Vec<_>>()
            })
            .collect())
    }

    /// `log2 b_i`.
    pub fn log2_coefficient(&self, i: u64) -> f64 {
        (self.k as u64 + i) as f64 * self.d as f64 - self.alpha * (i as f64).log2()
    }
}

pub fn scattered(spec: &ScatteredSpec) -> Result<SparseStepFunction> {
    let cubes = spec.t_prime()?;
    let deepest = spec.k as u64 + cubes.len() as u64;
    if deepest > MAX_LEVEL as u64 {
        return Err(Error::Capacity { required: deepest as u128, budget: MAX_LEVEL as u64 });
    }
    let mut f = SparseStepFunction::new(spec.d)?;
    for (i0, c) in cubes.iter().enumerate() {
        let i = i0 as u64 + 1;
        let level = spec.k + i as u32;
        let cube = match spec.placement {
            Placement::LowerCorner => c.lower_corner_descendant(level),
            Placement::UpperCorner => c.upper_corner_descendant(level),
        };
        f.push(cube, LogCoefficient::from_log2(1, spec.log2_coefficient(i)));
    }
    Ok(f)
}

/// `P_k f_k`: the value `2^(kd) i^-alpha` on `Delta'_i`, zero elsewhere.
pub fn scattered_projection(spec: &ScatteredSpec) -> Result<DyadicStepFunction> {
    let cubes = spec.t_prime()?;
    let mut out = DyadicStepFunction::zeros(spec.d, spec.k)?;
    let kd = (spec.k as usize * spec.d) as f64;
    for (i0, c) in cubes.iter().enumerate() {
        let i = (i0 + 1) as f64;
        out.values_mut()[c.flat_index()] = (kd - spec.alpha * i.log2()).exp2();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatteredNorms {
    pub log2_lp_pow: f64,
    /// `log2 E_l(f_k)_p^p` for `l = 0..k+N` (zero from `l = k+N` on).
    pub log2_err_pows: Vec<f64>,
    pub log2_lp_pow_projection: f64,
    /// `log2 E_l(P_k f_k)_p^p` for `l = 0..k`.
    pub log2_err_pows_projection: Vec<f64>,
    pub log2_a_norm: f64,
    pub log2_a_norm_projection: f64,
    pub a_norm: f64,
    pub a_norm_projection: f64,
    pub ratio: f64,
    pub log2_ratio: f64,
}

/// Closed-form norms for `p <= 1`. Zero covers at least half of every cube
/// that meets the family, so `E_l(f_k)_p^p` collects the full mass of every
/// `Delta_i` strictly smaller than the level-`l` cubes, i.e. `i >= l+1-k`:
/// `sum_i 2^(-(k+i)d(1-p)) i^(-alpha p)`.
pub fn scattered_closed_norms(spec: &ScatteredSpec, prm: &BesovParams) -> Result<ScatteredNorms> {
    require_p_at_most_one(prm.p)?;
    if prm.d != spec.d {
        return param_err("dimension of the family and parameters differ");
    }
    let n = spec.count()?;
    let (p, d, k) = (prm.p, spec.d as f64, spec.k as u64);
    let term = |i: u64| -(((k + i) as f64) * d * (1.0 - p)) - spec.alpha * p * (i as f64).log2();
    // suffix[i-1] = log2 sum_{j >= i} term_j, accumulated from the smallest terms up.
    let mut suffix = vec![f64::NEG_INFINITY; n as usize + 1];
    for i in (1..=n).rev() {
        suffix[i as usize - 1] = log2_add(term(i), suffix[i as usize]);
    }
    let log2_lp_pow = suffix[0];
    let log2_err_pows: Vec<f64> = (0..k + n)
        .map(|l| suffix[(l + 1).saturating_sub(k).max(1) as usize - 1])
        .collect();

    let mut power_sum = f64::NEG_INFINITY;
    for i in (1..=n).rev() {
        power_sum = log2_add(power_sum, -spec.alpha * p * (i as f64).log2());
    }
    let log2_lp_pow_projection = -(k as f64) * d * (1.0 - p) + power_sum;
    let log2_err_pows_projection = vec![log2_lp_pow_projection; k as usize];

    let log2_a_norm = log2_a_norm_from_log2(log2_lp_pow, &log2_err_pows, prm)?;
    let log2_a_norm_projection = log2_a_norm_from_log2(log2_lp_pow_projection, &log2_err_pows_projection, prm)?;
    let log2_ratio = log2_a_norm_projection - log2_a_norm;
    Ok(ScatteredNorms {
        log2_lp_pow,
        log2_err_pows,
        log2_lp_pow_projection,
        log2_err_pows_projection,
        log2_a_norm,
        log2_a_norm_projection,
        a_norm: log2_a_norm.exp2(),
        a_norm_projection: log2_a_norm_projection.exp2(),
        ratio: log2_ratio.exp2(),
        log2_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance() {
        let spec = ScatteredSpec::new(1, 1, 0.5);
        assert_eq!(spec.t_prime().unwrap(), vec![DyadicCube::new(1, vec![0]).unwrap()]);
        let f = scattered(&spec).unwrap();
        assert_eq!(f.atoms().len(), 1);
        assert_eq!(f.atoms()[0].cube, DyadicCube::new(2, vec![0]).unwrap());
        assert_eq!(f.atoms()[0].coeff.to_f64(), 4.0);
    }

    #[test]
    fn counts_and_parents() {
        for (k, d) in [(1, 2), (2, 2), (2, 3), (3, 1)] {
            let spec = ScatteredSpec::new(k, d, 1.0);
            let t = spec.t_prime().unwrap();
            assert_eq!(t.len() as u64, 1u64 << (k as usize * d - 1));
            for parent in DyadicCube::all(d, k - 1) {
                assert_eq!(t.iter().filter(|c| parent.contains(c)).count(), 1 << (d - 1));
            }
        }
        let deep = ScatteredSpec::new(7, 1, 1.0);
        assert!(matches!(scattered(&deep), Err(Error::Capacity { .. })));
    }

    #[test]
    fn errors_vanish_past_the_last_cube() {
        let spec = ScatteredSpec::new(2, 1, 1.0);
        let prm = BesovParams::new(0.6, 0.9, 1.0 / 0.6 - 1.0, 1).unwrap();
        let n = scattered_closed_norms(&spec, &prm).unwrap();
        assert_eq!(n.log2_err_pows.len(), 2 + 2);
        assert_eq!(n.log2_err_pows[0], n.log2_lp_pow);
        assert_eq!(n.log2_err_pows_projection.len(), 2);
    }
}
