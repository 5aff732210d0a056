//! Classification of parameter triples by the basis properties of the Haar systems.

use serde::Serialize;

use crate::approx::BesovParams;
use crate::error::{param_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    UnconditionalBasis,
    ConditionalBasis,
    NotBasisTrivialDual,
    NotBasisUnboundedProjectors,
    NotBasisTensor,
    DegenerateSpace,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::UnconditionalBasis,
        Regime::ConditionalBasis,
        Regime::NotBasisTrivialDual,
        Regime::NotBasisUnboundedProjectors,
        Regime::NotBasisTensor,
        Regime::DegenerateSpace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::UnconditionalBasis => "unconditional_basis",
            Regime::ConditionalBasis => "conditional_basis",
            Regime::NotBasisTrivialDual => "not_basis_trivial_dual",
            Regime::NotBasisUnboundedProjectors => "not_basis_unbounded_projectors",
            Regime::NotBasisTensor => "not_basis_tensor",
            Regime::DegenerateSpace => "degenerate_space",
        }
    }

    /// Small integer code, used as a numeric value in reports.
    pub fn code(&self) -> u8 {
        Regime::ALL.iter().position(|r| r == self).unwrap() as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Isotropic,
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub regime: Regime,
    pub citation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

fn class(regime: Regime, citation: &'static str) -> Classification {
    Classification { regime, citation, note: None }
}

/// Tolerance for deciding that `s` lies on the critical line `s = d(1/p - 1)`.
const CRITICAL_TOL: f64 = 1e-12;

/// Basis property of the Haar system `system` in `B^s_{p,q,1}(I^d)`.
/// Needs `q < inf` and `0 <= s < 1/p`.
pub fn classify(prm: &BesovParams, system: System) -> Result<Classification> {
    classify_with(prm, system, false)
}

/// As [`classify`]; with `allow_degenerate`, parameters with `s >= 1/p`
/// are reported as [`Regime::DegenerateSpace`] instead of rejected.
pub fn classify_with(prm: &BesovParams, system: System, allow_degenerate: bool) -> Result<Classification> {
    let BesovParams { p, q, s, d } = *prm;
    if !q.is_finite() {
        return param_err("classification needs a finite q");
    }
    let crit = prm.critical_smoothness();
    let on_critical_line = p < 1.0 && (s - crit).abs() <= CRITICAL_TOL * crit.max(1.0);
    // When d(1-p) = 1 the critical line meets s = 1/p; that point keeps the
    // critical-line answer.
    if s >= 1.0 / p && !(on_critical_line && system == System::Isotropic) {
        if allow_degenerate {
            return Ok(class(
                Regime::DegenerateSpace,
                "for s >= 1/p the space reduces to the constant functions",
            ));
        }
        return param_err(format!("s = {s} must be below 1/p = {}", 1.0 / p));
    }
    if system == System::Tensor && d > 1 {
        return Ok(if p > 1.0 {
            class(Regime::UnconditionalBasis, "tensor Haar system: unconditional basis iff 1 < p < inf")
        } else if p == 1.0 {
            class(Regime::ConditionalBasis, "tensor Haar system at p = 1: basis, not unconditional")
        } else {
            class(
                Regime::NotBasisTensor,
                "tensor Haar system for 0 < p < 1: rank-one coefficient projectors are unbounded",
            )
        });
    }
    if p >= 1.0 {
        if s > 0.0 || p > 1.0 {
            return Ok(class(Regime::UnconditionalBasis, "unconditional basis for 1 <= p < inf, 0 < s < 1/p and for 1 < p < inf, s = 0"));
        }
        return Ok(class(Regime::ConditionalBasis, "p = 1, s = 0: basis in blockwise order, not unconditional"));
    }
    if on_critical_line {
        return Ok(if q <= p {
            class(Regime::ConditionalBasis, "critical line s = d(1/p-1), q <= p < 1: basis, not unconditional")
        } else if q <= 1.0 {
            Classification {
                regime: Regime::NotBasisUnboundedProjectors,
                citation: "critical line s = d(1/p-1), p < q <= 1: Haar partial sum projectors are unbounded",
                note: Some("whether the space has some other basis is open"),
            }
        } else {
            class(Regime::NotBasisTrivialDual, "critical line s = d(1/p-1), q > 1: no nonzero bounded linear functional")
        });
    }
    if s > crit {
        return Ok(class(Regime::UnconditionalBasis, "unconditional basis for d(1/p-1) < s < 1/p"));
    }
    Ok(Classification {
        regime: Regime::NotBasisTrivialDual,
        citation: "s < d(1/p-1): no nonzero bounded linear functional",
        note: (s == 0.0).then_some("s=0 extension"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(p: f64, q: f64, s: f64, d: usize, sys: System) -> Regime {
        classify(&BesovParams::new(p, q, s, d).unwrap(), sys).unwrap().regime
    }

    #[test]
    fn examples() {
        assert_eq!(reg(0.8, 0.8, 0.25, 1, System::Isotropic), Regime::ConditionalBasis);
        let boundary = BesovParams::unrestricted(0.5, 2.0, 2.0, 2).unwrap();
        assert_eq!(classify(&boundary, System::Isotropic).unwrap().regime, Regime::NotBasisTrivialDual);
        assert!(classify(&BesovParams::unrestricted(0.5, 2.0, 2.5, 2).unwrap(), System::Isotropic).is_err());
        assert_eq!(reg(0.5, 1.0, 1.0, 2, System::Tensor), Regime::NotBasisTensor);
        assert_eq!(reg(2.0, 0.7, 0.3, 3, System::Isotropic), Regime::UnconditionalBasis);
        assert_eq!(reg(0.8, 0.9, 0.5, 2, System::Isotropic), Regime::NotBasisUnboundedProjectors);
        assert_eq!(reg(1.0, 2.0, 0.0, 2, System::Isotropic), Regime::ConditionalBasis);
        assert_eq!(reg(1.5, 2.0, 0.0, 2, System::Isotropic), Regime::UnconditionalBasis);
        let c = classify(&BesovParams::new(0.5, 1.0, 0.0, 1).unwrap(), System::Isotropic).unwrap();
        assert_eq!((c.regime, c.note), (Regime::NotBasisTrivialDual, Some("s=0 extension")));
    }

    #[test]
    fn degenerate_only_on_request() {
        let prm = BesovParams::unrestricted(0.5, 1.0, 2.0, 1).unwrap();
        assert!(classify(&prm, System::Isotropic).is_err());
        let c = classify_with(&prm, System::Isotropic, true).unwrap();
        assert_eq!(c.regime, Regime::DegenerateSpace);
        let inf = BesovParams::new(0.5, f64::INFINITY, 0.5, 1).unwrap();
        assert!(classify(&inf, System::Isotropic).is_err());
    }
}
