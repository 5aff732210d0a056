use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::cube::{box_cells, check_dim, DyadicCube};
use super::dense::{cell_count, DyadicStepFunction, DEFAULT_CELL_BUDGET};
use super::histogram::ValueHistogram;
use crate::error::{param_err, Result};
use crate::numeric::{log2_sum, CompensatedSum};

/// A real number stored as sign and base-2 logarithm of its magnitude, so that
/// coefficients far outside the `f64` exponent range can still be combined
/// with cube measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoefficient {
    pub sign: i8,
    pub log2mag: f64,
}

impl LogCoefficient {
    pub const ZERO: LogCoefficient = LogCoefficient { sign: 0, log2mag: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                log2mag: x.abs().log2(),
            }
        }
    }

    /// `sign * 2^log2mag`.
    pub fn from_log2(sign: i8, log2mag: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            Self { sign: sign.signum(), log2mag }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.log2mag.exp2()
        }
    }

    /// Multiply by `2^e`.
    pub fn mul_pow2(&self, e: f64) -> Self {
        if self.sign == 0 {
            *self
        } else {
            Self { sign: self.sign, log2mag: self.log2mag + e }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub cube: DyadicCube,
    pub coeff: LogCoefficient,
}

/// Finite sum `sum_i c_i chi_{Delta_i}` of indicator functions of dyadic
/// cubes. Cubes may sit at different levels and may nest.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseStepFunction {
    d: usize,
    atoms: Vec<Atom>,
}

impl SparseStepFunction {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { d, atoms: Vec::new() })
    }

    pub fn from_atoms(d: usize, atoms: Vec<Atom>) -> Result<Self> {
        check_dim(d)?;
        if let Some(a) = atoms.iter().find(|a| a.cube.dim() != d) {
            return param_err(format!("atom cube of dimension {} in a d={d} function", a.cube.dim()));
        }
        Ok(Self { d, atoms })
    }

    pub fn push(&mut self, cube: DyadicCube, coeff: LogCoefficient) {
        assert_eq!(cube.dim(), self.d);
        self.atoms.push(Atom { cube, coeff });
    }

    pub fn push_f64(&mut self, cube: DyadicCube, c: f64) {
        self.push(cube, LogCoefficient::from_f64(c));
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Deepest atom level (0 for the empty function).
    pub fn finest_level(&self) -> u32 {
        self.atoms.iter().map(|a| a.cube.level()).max().unwrap_or(0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let lc = LogCoefficient::from_f64(c);
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                cube: a.cube.clone(),
                coeff: LogCoefficient::from_log2(a.coeff.sign * lc.sign, a.coeff.log2mag + lc.log2mag),
            })
            .collect();
        Self { d: self.d, atoms }
    }

    /// Atoms with identical cubes merged (coefficients summed in `f64`) and zeros dropped.
    fn merged(&self) -> BTreeMap<DyadicCube, f64> {
        let mut acc: BTreeMap<DyadicCube, CompensatedSum> = BTreeMap::new();
        for a in self.atoms.iter().filter(|a| !a.coeff.is_zero()) {
            acc.entry(a.cube.clone()).or_default().add(a.coeff.to_f64());
        }
        acc.into_iter()
            .map(|(c, s)| (c, s.value()))
            .filter(|&(_, v)| v != 0.0)
            .collect()
    }

    /// True if no atom cube contains another one.
    pub fn is_nesting_free(&self) -> bool {
        let mut seen: HashMap<&DyadicCube, ()> = HashMap::new();
        let mut cubes: Vec<&DyadicCube> = self.atoms.iter().filter(|a| !a.coeff.is_zero()).map(|a| &a.cube).collect();
        cubes.sort_by_key(|c| c.level());
        for c in cubes {
            if seen.contains_key(c) {
                return false;
            }
            for l in 0..c.level() {
                if seen.contains_key(&c.ancestor(l)) {
                    return false;
                }
            }
            seen.insert(c, ());
        }
        true
    }

    pub fn densify(&self, m: u32) -> Result<DyadicStepFunction> {
        self.densify_within(m, DEFAULT_CELL_BUDGET)
    }

    /// Pointwise atom sum on `T_m^d`.
    pub fn densify_within(&self, m: u32, budget: u64) -> Result<DyadicStepFunction> {
        let deepest = self.finest_level();
        if m < deepest {
            return param_err(format!("densify level {m} is coarser than atom level {deepest}"));
        }
        let n = cell_count(self.d, m, budget)?;
        let mut values = vec![0.0; n];
        let side = 1usize << m;
        for a in &self.atoms {
            let c = a.coeff.to_f64();
            if c == 0.0 {
                continue;
            }
            let shift = m - a.cube.level();
            let lo: Vec<usize> = a.cube.index().iter().map(|&i| (i as usize) << shift).collect();
            for f in box_cells(self.d, side, &lo, 1usize << shift) {
                values[f] += c;
            }
        }
        DyadicStepFunction::new(self.d, m, values)
    }

    /// `P_k f` on `T_k^d`; atoms deeper than `k` are spread over their level-k
    /// ancestor with weight `2^(-(l-k)d)`, computed in the log domain.
    pub fn average_project(&self, k: u32) -> Result<DyadicStepFunction> {
        let n = cell_count(self.d, k, DEFAULT_CELL_BUDGET)?;
        let mut acc = vec![CompensatedSum::new(); n];
        let side = 1usize << k;
        for a in self.atoms.iter().filter(|a| !a.coeff.is_zero()) {
            let l = a.cube.level();
            if l <= k {
                let shift = k - l;
                let c = a.coeff.to_f64();
                let lo: Vec<usize> = a.cube.index().iter().map(|&i| (i as usize) << shift).collect();
                for f in box_cells(self.d, side, &lo, 1usize << shift) {
                    acc[f].add(c);
                }
            } else {
                let c = a.coeff.mul_pow2(-(((l - k) as usize * self.d) as f64)).to_f64();
                acc[a.cube.ancestor(k).flat_index()].add(c);
            }
        }
        DyadicStepFunction::new(self.d, k, acc.iter().map(|s| s.value()).collect())
    }

    /// Exact `(value, measure)` distribution on `cube`, from the containment
    /// forest of the atoms inside it.
    pub fn value_histogram(&self, cube: &DyadicCube) -> ValueHistogram {
        assert_eq!(cube.dim(), self.d);
        let dl = cube.level();
        let mut base = CompensatedSum::new();
        let mut inner: Vec<(DyadicCube, f64)> = Vec::new();
        for (c, v) in self.merged() {
            if c.level() <= dl {
                if c.contains(cube) {
                    base.add(v);
                }
            } else if cube.contains(&c) {
                inner.push((c, v));
            }
        }
        let base = base.value();
        // BTreeMap order is (level, index), so parents precede children.
        inner.sort_by(|a, b| a.0.level().cmp(&b.0.level()).then_with(|| a.0.cmp(&b.0)));
        let mut node_of: HashMap<DyadicCube, usize> = HashMap::with_capacity(inner.len());
        let mut value = Vec::with_capacity(inner.len());
        let mut covered = vec![CompensatedSum::new(); inner.len()];
        let mut root_cover = CompensatedSum::new();
        for (i, (c, v)) in inner.iter().enumerate() {
            let parent = (dl + 1..c.level())
                .rev()
                .find_map(|l| node_of.get(&c.ancestor(l)).copied());
            match parent {
                Some(pi) => {
                    value.push(value[pi] + v);
                    covered[pi].add(c.measure());
                }
                None => {
                    value.push(base + v);
                    root_cover.add(c.measure());
                }
            }
            node_of.insert(c.clone(), i);
        }
        let mut pairs = Vec::with_capacity(inner.len() + 1);
        pairs.push((base, cube.measure() - root_cover.value()));
        for (i, (c, _)) in inner.iter().enumerate() {
            pairs.push((value[i], c.measure() - covered[i].value()));
        }
        ValueHistogram::from_pairs(pairs)
    }

    /// Cubes of `level` on which the function may fail to be constant: the
    /// level-`level` ancestors of deeper atoms.
    pub fn nonconstant_cubes(&self, level: u32) -> Vec<DyadicCube> {
        let mut cubes: Vec<DyadicCube> = self
            .atoms
            .iter()
            .filter(|a| !a.coeff.is_zero() && a.cube.level() > level)
            .map(|a| a.cube.ancestor(level))
            .collect();
        cubes.sort();
        cubes.dedup();
        cubes
    }

    /// `log2 ||f||_p^p`. Nesting-free atom sets are summed directly in the log
    /// domain; otherwise the global value histogram is used.
    pub fn log2_lp_norm_pow(&self, p: f64) -> f64 {
        if self.is_nesting_free() {
            let logs: Vec<f64> = self
                .atoms
                .iter()
                .filter(|a| !a.coeff.is_zero())
                .map(|a| p * a.coeff.log2mag - a.cube.log2_measure_neg() as f64)
                .collect();
            log2_sum(&logs)
        } else {
            let h = self.value_histogram(&DyadicCube::unit(self.d));
            let mut acc = CompensatedSum::new();
            for &(v, w) in h.entries() {
                acc.add(w * v.abs().powf(p));
            }
            acc.value().log2()
        }
    }

    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        self.log2_lp_norm_pow(p).exp2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(level: u32, idx: &[u64]) -> DyadicCube {
        DyadicCube::new(level, idx.to_vec()).unwrap()
    }

    #[test]
    fn densify_examples() {
        let mut f = SparseStepFunction::new(1).unwrap();
        f.push_f64(cube(1, &[0]), 3.0);
        assert_eq!(f.densify(2).unwrap().values(), &[3.0, 3.0, 0.0, 0.0]);

        let empty = SparseStepFunction::new(2).unwrap();
        assert_eq!(empty.densify(1).unwrap().values(), &[0.0; 4]);

        let mut g = SparseStepFunction::new(1).unwrap();
        g.push_f64(DyadicCube::unit(1), 1.0);
        g.push_f64(cube(1, &[0]), 2.0);
        assert_eq!(g.densify(1).unwrap().values(), &[3.0, 1.0]);
        assert!(!g.is_nesting_free());
        assert!(g.densify(0).is_err());
    }

    #[test]
    fn spike_histogram() {
        for d in 1..=3usize {
            let m = 3u32;
            let mut f = SparseStepFunction::new(d).unwrap();
            f.push(DyadicCube::lower_corner(d, m), LogCoefficient::from_log2(1, (m as usize * d) as f64));
            let h = f.value_histogram(&DyadicCube::unit(d));
            let small = (-((m as usize * d) as f64)).exp2();
            let big = ((m as usize * d) as f64).exp2();
            assert_eq!(h.entries(), &[(0.0, 1.0 - small), (big, small)]);
        }
    }

    #[test]
    fn log_coefficients() {
        let c = LogCoefficient::from_f64(-8.0);
        assert_eq!(c.sign, -1);
        assert_eq!(c.log2mag, 3.0);
        assert_eq!(c.mul_pow2(-5.0).to_f64(), -0.25);
        assert_eq!(LogCoefficient::from_f64(0.0).to_f64(), 0.0);
    }

    #[test]
    fn projection_of_deep_atom() {
        let mut f = SparseStepFunction::new(1).unwrap();
        f.push(cube(40, &[3]), LogCoefficient::from_log2(1, 40.0));
        let p = f.average_project(1).unwrap();
        assert_eq!(p.values(), &[2.0, 0.0]);
        assert!((f.lp_norm_pow(0.5) - 2f64.powi(-20)).abs() < 1e-18);
    }
}
