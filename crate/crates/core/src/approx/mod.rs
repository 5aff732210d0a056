//! Besov quasi-norms through best approximation, the modulus of smoothness
//! and the Haar square function.

mod best_constant;
mod modulus;
mod norms;

pub use best_constant::best_constant_error;
pub use modulus::{b_norm_from_profile, b_norm_modulus, modulus, shift_difference_pow, ModulusProfile};
pub use norms::{
    a_norm, a_norm_from_log2, log2_a_norm_from_log2, approx_error, approx_error_pow, approx_errors_log2, b0_221_weighted_sum,
    projection_error, square_function_norm,
};

use serde::{Deserialize, Serialize};

use crate::dyadic::check_dim;
use crate::error::{param_err, Result};

/// Parameters `(p, q, s, d)` of a Besov space on `I^d`. `q = f64::INFINITY`
/// stands for `q = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub d: usize,
}

impl BesovParams {
    /// Validated parameters: `0 < p < inf`, `0 < q <= inf`, `s >= 0`, and
    /// `s < 1/p` (`s <= 1/p` when `q = inf`).
    pub fn new(p: f64, q: f64, s: f64, d: usize) -> Result<Self> {
        let prm = Self::unrestricted(p, q, s, d)?;
        let limit = 1.0 / p;
        if prm.q.is_finite() && s >= limit {
            return param_err(format!("s = {s} must be below 1/p = {limit}"));
        }
        if !prm.q.is_finite() && s > limit {
            return param_err(format!("s = {s} must not exceed 1/p = {limit} when q is infinite"));
        }
        Ok(prm)
    }

    /// Like [`BesovParams::new`] but without the upper bound on `s`; such
    /// spaces only contain constants.
    pub fn unrestricted(p: f64, q: f64, s: f64, d: usize) -> Result<Self> {
        check_dim(d)?;
        if !(p > 0.0 && p.is_finite()) {
            return param_err(format!("p must be positive and finite, got {p}"));
        }
        if !(q > 0.0) || q.is_nan() {
            return param_err(format!("q must be positive, got {q}"));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return param_err(format!("s must be nonnegative and finite, got {s}"));
        }
        Ok(Self { p, q, s, d })
    }

    /// `min(p, q, 1)`, the exponent of the quasi-triangle inequality.
    pub fn gamma(&self) -> f64 {
        self.p.min(self.q).min(1.0)
    }

    /// `d (1/p - 1)`.
    pub fn critical_smoothness(&self) -> f64 {
        self.d as f64 * (1.0 / self.p - 1.0)
    }

    pub fn q_is_finite(&self) -> bool {
        self.q.is_finite()
    }

    pub(crate) fn require_finite_q(&self) -> Result<()> {
        if self.q.is_finite() {
            Ok(())
        } else {
            param_err("this quasi-norm needs a finite q")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(BesovParams::new(0.5, 1.0, 1.5, 2).is_ok());
        assert!(BesovParams::new(0.5, 1.0, 2.0, 2).is_err());
        assert!(BesovParams::new(0.5, f64::INFINITY, 2.0, 2).is_ok());
        assert!(BesovParams::new(0.0, 1.0, 0.0, 1).is_err());
        assert!(BesovParams::new(1.0, -1.0, 0.0, 1).is_err());
        assert!(BesovParams::new(1.0, 1.0, -0.1, 1).is_err());
        assert!(BesovParams::new(1.0, 1.0, 0.1, 0).is_err());
        assert!(BesovParams::unrestricted(0.5, 1.0, 3.0, 2).is_ok());
        assert_eq!(BesovParams::new(0.5, 2.0, 0.1, 1).unwrap().gamma(), 0.5);
    }
}
