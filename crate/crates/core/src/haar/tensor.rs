use serde::{Deserialize, Serialize};

use crate::dyadic::{cell_count, check_dim, DyadicStepFunction, DEFAULT_CELL_BUDGET};
use crate::error::{param_err, Error, Result};
use crate::numeric::CompensatedSum;

/// Index `(n_1, ..., n_d)` of `h_{n_1} (x) ... (x) h_{n_d}`. In one variable
/// `h_1 = chi_I` and `h_{2^(k-1)+i}` (`1 <= i <= 2^(k-1)`) is the Haar
/// function of the `i`-th interval of level `k-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorHaarIndex(pub Vec<u64>);

/// Level of the univariate index `n >= 1`: 0 for `n = 1`, else `ceil(log2 n)`.
pub fn univariate_level(n: u64) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

impl TensorHaarIndex {
    pub fn new(n: Vec<u64>) -> Result<Self> {
        check_dim(n.len())?;
        if n.contains(&0) {
            return param_err("tensor Haar indices start at 1");
        }
        Ok(Self(n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Block containing the function: the largest factor level.
    pub fn block(&self) -> u32 {
        self.0.iter().map(|&n| univariate_level(n)).max().unwrap_or(0)
    }
}

/// Values of the univariate `h_n` on the `2^m` cells of level `m >= level(n)`.
fn univariate_values(n: u64, m: u32) -> Vec<f64> {
    let side = 1usize << m;
    let k = univariate_level(n);
    if k == 0 {
        return vec![1.0; side];
    }
    let i = (n - (1u64 << (k - 1)) - 1) as usize;
    let width = side >> (k - 1);
    let mut v = vec![0.0; side];
    for (c, x) in v[i * width..(i + 1) * width].iter_mut().enumerate() {
        *x = if c < width / 2 { 1.0 } else { -1.0 };
    }
    v
}

/// The tensor Haar function on `T_m^d`.
pub fn tensor_function(idx: &TensorHaarIndex, m: u32) -> Result<DyadicStepFunction> {
    let d = idx.dim();
    if idx.block() > m {
        return param_err(format!("level {m} is too coarse for {:?}", idx.0));
    }
    let factors: Vec<Vec<f64>> = idx.0.iter().map(|&n| univariate_values(n, m)).collect();
    let side = 1usize << m;
    let n = cell_count(d, m, DEFAULT_CELL_BUDGET)?;
    let values = (0..n)
        .map(|flat| {
            let mut rem = flat;
            let mut v = 1.0;
            for j in (0..d).rev() {
                v *= factors[j][rem % side];
                rem /= side;
            }
            v
        })
        .collect();
    DyadicStepFunction::new(d, m, values)
}

/// Tensor Haar coefficients of a function on `T_m^d`, stored densely: the
/// coefficient of `(n_1, ..., n_d)` sits at the row-major position of
/// `(n_1 - 1, ..., n_d - 1)` in a `2^m`-sided array.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorCoefficients {
    d: usize,
    m: u32,
    values: Vec<f64>,
}

impl TensorCoefficients {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn position(&self, idx: &TensorHaarIndex) -> Option<usize> {
        let side = 1u64 << self.m;
        if idx.dim() != self.d || idx.0.iter().any(|&n| n > side) {
            return None;
        }
        Some(idx.0.iter().fold(0usize, |acc, &n| acc * side as usize + (n - 1) as usize))
    }

    pub fn get(&self, idx: &TensorHaarIndex) -> f64 {
        self.position(idx).map_or(0.0, |p| self.values[p])
    }

    /// Nonzero entries in storage order.
    pub fn nonzero(&self) -> Vec<(TensorHaarIndex, f64)> {
        let side = 1usize << self.m;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(flat, &v)| {
                let mut n = vec![0u64; self.d];
                let mut rem = flat;
                for j in (0..self.d).rev() {
                    n[j] = (rem % side) as u64 + 1;
                    rem /= side;
                }
                (TensorHaarIndex(n), v)
            })
            .collect()
    }

    pub fn from_entries(d: usize, m: u32, entries: &[(TensorHaarIndex, f64)]) -> Result<Self> {
        let n = cell_count(d, m, DEFAULT_CELL_BUDGET)?;
        let mut out = Self { d, m, values: vec![0.0; n] };
        for (idx, v) in entries {
            let p = out
                .position(idx)
                .ok_or_else(|| Error::Parameter(format!("index {:?} does not fit level {m}", idx.0)))?;
            out.values[p] = *v;
        }
        Ok(out)
    }
}

/// Applies `op` to every line of a row-major cube array along `axis`.
fn for_each_line(values: &mut [f64], d: usize, side: usize, axis: usize, mut op: impl FnMut(&mut [f64])) {
    let inner = side.pow((d - 1 - axis) as u32);
    let outer = values.len() / (side * inner);
    let mut line = vec![0.0; side];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * side * inner + i;
            for (c, x) in line.iter_mut().enumerate() {
                *x = values[base + c * inner];
            }
            op(&mut line);
            for (c, &x) in line.iter().enumerate() {
                values[base + c * inner] = x;
            }
        }
    }
}

/// Univariate analysis in place: position `n - 1` receives the coefficient of `h_n`.
fn analyze_line(line: &mut [f64], tmp: &mut Vec<f64>) {
    let mut len = line.len();
    while len > 1 {
        let half = len / 2;
        tmp.clear();
        tmp.extend_from_slice(&line[..len]);
        for i in 0..half {
            let (a, b) = (tmp[2 * i], tmp[2 * i + 1]);
            line[i] = 0.5 * (a + b);
            line[half + i] = 0.5 * (a - b);
        }
        len = half;
    }
}

fn synthesize_line(line: &mut [f64], tmp: &mut Vec<f64>) {
    let mut len = 2;
    while len <= line.len() {
        let half = len / 2;
        tmp.clear();
        tmp.extend_from_slice(&line[..len]);
        for i in 0..half {
            let (x, y) = (tmp[i], tmp[half + i]);
            line[2 * i] = x + y;
            line[2 * i + 1] = x - y;
        }
        len *= 2;
    }
}

/// Separable tensor Haar analysis.
pub fn tensor_analyze(f: &DyadicStepFunction) -> TensorCoefficients {
    let (d, m) = (f.dim(), f.level());
    let side = f.side();
    let mut values = f.values().to_vec();
    let mut tmp = Vec::with_capacity(side);
    for axis in 0..d {
        for_each_line(&mut values, d, side, axis, |l| analyze_line(l, &mut tmp));
    }
    TensorCoefficients { d, m, values }
}

pub fn tensor_synthesize(c: &TensorCoefficients) -> DyadicStepFunction {
    let side = 1usize << c.m;
    let mut values = c.values.clone();
    let mut tmp = Vec::with_capacity(side);
    for axis in (0..c.d).rev() {
        for_each_line(&mut values, c.d, side, axis, |l| synthesize_line(l, &mut tmp));
    }
    DyadicStepFunction::new(c.d, c.m, values).expect("shape preserved")
}

/// Rank-one projection `(<f,theta>/<theta,theta>) theta`, on the finer of the
/// two levels.
pub fn rank_one_project(f: &DyadicStepFunction, theta: &TensorHaarIndex) -> Result<DyadicStepFunction> {
    if theta.dim() != f.dim() {
        return param_err("dimension mismatch");
    }
    let m = f.level().max(theta.block());
    let f = f.refine(m)?;
    let t = tensor_function(theta, m)?;
    let (mut num, mut den) = (CompensatedSum::new(), CompensatedSum::new());
    for (&a, &b) in f.values().iter().zip(t.values()) {
        num.add(a * b);
        den.add(b * b);
    }
    Ok(t.scaled(num.value() / den.value()))
}

/// Functions of tensor block `block` for `d = 2` in Schauder order: block 0 is
/// `(1,1)`; block `k+1` lists `(2^k+i, n)` for `i = 1..2^k`, `n = 1..2^(k+1)`,
/// then `(n, 2^k+i)` for `i = 1..2^k`, `n = 1..2^k`, each lexicographic in `(i, n)`.
pub fn block_order_d2(d: usize, block: u32) -> Result<Vec<TensorHaarIndex>> {
    if d != 2 {
        return Err(Error::Unsupported(format!(
            "the explicit tensor ordering is implemented for d = 2 only, got d = {d}"
        )));
    }
    if block > 30 {
        return param_err("block too large to enumerate");
    }
    if block == 0 {
        return Ok(vec![TensorHaarIndex(vec![1, 1])]);
    }
    let half = 1u64 << (block - 1);
    let mut out = Vec::with_capacity(3 * (half * half) as usize);
    for i in 1..=half {
        for n in 1..=2 * half {
            out.push(TensorHaarIndex(vec![half + i, n]));
        }
    }
    for i in 1..=half {
        for n in 1..=half {
            out.push(TensorHaarIndex(vec![n, half + i]));
        }
    }
    Ok(out)
}
