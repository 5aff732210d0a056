use super::cube::{box_cells, check_dim, DyadicCube, MAX_LEVEL};
use super::histogram::ValueHistogram;
use crate::error::{param_err, Error, Result};
use crate::numeric::CompensatedSum;

/// Default cap on the number of cells a dense function may hold.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 26;

/// Number of cells of `T_level^d`, checked against `budget`.
pub fn cell_count(d: usize, level: u32, budget: u64) -> Result<usize> {
    check_dim(d)?;
    let bits = level as u128 * d as u128;
    let required = if bits >= 127 { u128::MAX } else { 1u128 << bits };
    if level > MAX_LEVEL || required > budget as u128 {
        return Err(Error::Capacity { required, budget });
    }
    Ok(required as usize)
}

/// Piecewise constant function on the uniform partition `T_m^d`, values in
/// row-major multi-index order (first axis slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicStepFunction {
    d: usize,
    level: u32,
    values: Vec<f64>,
}

impl DyadicStepFunction {
    pub fn new(d: usize, level: u32, values: Vec<f64>) -> Result<Self> {
        let n = cell_count(d, level, u64::MAX)?;
        if values.len() != n {
            return param_err(format!(
                "expected {n} values for d={d}, level={level}, got {}",
                values.len()
            ));
        }
        Ok(Self { d, level, values })
    }

    pub fn constant(d: usize, level: u32, c: f64) -> Result<Self> {
        let n = cell_count(d, level, DEFAULT_CELL_BUDGET)?;
        Ok(Self { d, level, values: vec![c; n] })
    }

    pub fn zeros(d: usize, level: u32) -> Result<Self> {
        Self::constant(d, level, 0.0)
    }

    /// Builds a function by evaluating `f` on every cell.
    pub fn from_fn(d: usize, level: u32, mut f: impl FnMut(&DyadicCube) -> f64) -> Result<Self> {
        let n = cell_count(d, level, DEFAULT_CELL_BUDGET)?;
        let values = (0..n).map(|i| f(&DyadicCube::from_flat(d, level, i))).collect();
        Ok(Self { d, level, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn side(&self) -> usize {
        1usize << self.level
    }

    pub fn cell_measure(&self) -> f64 {
        (-((self.level as usize * self.d) as f64)).exp2()
    }

    /// Value on the cell containing `x`; the right boundary 1 belongs to the last cell.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d);
        let side = self.side();
        let flat = x.iter().fold(0usize, |acc, &xj| {
            let i = ((xj * side as f64).floor().max(0.0) as usize).min(side - 1);
            acc * side + i
        });
        self.values[flat]
    }

    /// The same function sampled on the finer partition `T_level^d`.
    pub fn refine(&self, level: u32) -> Result<Self> {
        self.refine_within(level, DEFAULT_CELL_BUDGET)
    }

    pub fn refine_within(&self, level: u32, budget: u64) -> Result<Self> {
        if level < self.level {
            return param_err(format!("cannot refine level {} to coarser level {level}", self.level));
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let n = cell_count(self.d, level, budget)?;
        let shift = level - self.level;
        let side = 1usize << level;
        let coarse_side = self.side();
        let values = (0..n)
            .map(|flat| {
                let mut rem = flat;
                let mut coarse = 0usize;
                let mut mul = 1usize;
                for _ in 0..self.d {
                    let i = rem % side;
                    rem /= side;
                    coarse += (i >> shift) * mul;
                    mul *= coarse_side;
                }
                self.values[coarse]
            })
            .collect();
        Ok(Self { d: self.d, level, values })
    }

    /// `sum_cells 2^(-md) |v|^p`, accumulated in row-major order.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let w = self.cell_measure();
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(w * v.abs().powf(p));
        }
        acc.value()
    }

    pub fn integral(&self) -> f64 {
        let w = self.cell_measure();
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(w * v);
        }
        acc.value()
    }

    /// Averages over `T_k^d` (the projector `P_k`). For `k >= level` the function
    /// is returned unchanged at its own level.
    pub fn average_project(&self, k: u32) -> DyadicStepFunction {
        let mut out = self.clone();
        while out.level > k {
            out = out.coarsen_once();
        }
        out
    }

    /// One level of averaging, as pairwise means along each axis in turn.
    fn coarsen_once(&self) -> DyadicStepFunction {
        let d = self.d;
        let side = self.side();
        let mut shape = vec![side; d];
        let mut cur = self.values.clone();
        for axis in 0..d {
            cur = halve_axis(&cur, &shape, axis);
            shape[axis] /= 2;
        }
        DyadicStepFunction { d, level: self.level - 1, values: cur }
    }

    /// Values of the cells inside `cube` (which must not be finer than the grid).
    pub fn cube_values(&self, cube: &DyadicCube) -> Vec<f64> {
        assert_eq!(cube.dim(), self.d);
        if cube.level() >= self.level {
            let flat = cube.ancestor(self.level).flat_index();
            return vec![self.values[flat]];
        }
        let shift = self.level - cube.level();
        let len = 1usize << shift;
        let lo: Vec<usize> = cube.index().iter().map(|&i| (i as usize) << shift).collect();
        box_cells(self.d, self.side(), &lo, len)
            .into_iter()
            .map(|f| self.values[f])
            .collect()
    }

    pub fn value_histogram(&self, cube: &DyadicCube) -> ValueHistogram {
        if cube.level() >= self.level {
            return ValueHistogram::from_pairs([(self.cube_values(cube)[0], cube.measure())]);
        }
        ValueHistogram::from_samples(&self.cube_values(cube), self.cell_measure())
    }

    /// `a f + b g`, evaluated on the finer of the two partitions.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self> {
        if f.d != g.d {
            return param_err("dimension mismatch");
        }
        let level = f.level.max(g.level);
        let (f, g) = (f.refine(level)?, g.refine(level)?);
        let values = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Self { d: f.d, level, values })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            level: self.level,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Sup-norm distance, compared on the finer partition.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let diff = Self::linear_combination(1.0, self, -1.0, other)?;
        Ok(diff.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

/// Pairwise means along `axis` of a row-major array with the given shape.
pub(crate) fn halve_axis(values: &[f64], shape: &[usize], axis: usize) -> Vec<f64> {
    let outer: usize = shape[..axis].iter().product();
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let half = len / 2;
    let mut out = vec![0.0; outer * half * inner];
    for o in 0..outer {
        for l in 0..half {
            let a = (o * len + 2 * l) * inner;
            let b = a + inner;
            let dst = (o * half + l) * inner;
            for i in 0..inner {
                out[dst + i] = 0.5 * (values[a + i] + values[b + i]);
            }
        }
    }
    out
}
