use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};

/// Deepest level a cube index can address (indices are stored as `u64`).
pub const MAX_LEVEL: u32 = 62;
/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 16;

/// Half-open dyadic cube `prod_j [i_j 2^-k, (i_j + 1) 2^-k)` in the unit cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawCube")]
pub struct DyadicCube {
    level: u32,
    index: Vec<u64>,
}

#[derive(Deserialize)]
struct RawCube {
    level: u32,
    index: Vec<u64>,
}

impl TryFrom<RawCube> for DyadicCube {
    type Error = crate::error::Error;

    fn try_from(raw: RawCube) -> Result<Self> {
        DyadicCube::new(raw.level, raw.index)
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return param_err(format!("dimension must lie in 1..={MAX_DIM}, got {d}"));
    }
    Ok(())
}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u64>) -> Result<Self> {
        check_dim(index.len())?;
        if level > MAX_LEVEL {
            return param_err(format!("cube level {level} exceeds the maximum {MAX_LEVEL}"));
        }
        let side = 1u64 << level;
        if let Some(&bad) = index.iter().find(|&&i| i >= side) {
            return param_err(format!("index component {bad} out of range for level {level}"));
        }
        Ok(Self { level, index })
    }

    /// The whole cube `I^d`.
    pub fn unit(d: usize) -> Self {
        Self { level: 0, index: vec![0; d] }
    }

    /// `[0, 2^-level)^d`.
    pub fn lower_corner(d: usize, level: u32) -> Self {
        assert!(level <= MAX_LEVEL);
        Self { level, index: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    /// Lebesgue measure `2^(-level d)`.
    pub fn measure(&self) -> f64 {
        (-(self.log2_measure_neg() as f64)).exp2()
    }

    /// `level * d`, i.e. `-log2` of the measure.
    pub fn log2_measure_neg(&self) -> u64 {
        self.level as u64 * self.dim() as u64
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.level < self.level || other.dim() != self.dim() {
            return false;
        }
        let shift = other.level - self.level;
        self.index
            .iter()
            .zip(&other.index)
            .all(|(&a, &b)| b >> shift == a)
    }

    /// True if the cubes share interior points (for dyadic cubes: one contains the other).
    pub fn intersects(&self, other: &DyadicCube) -> bool {
        self.contains(other) || other.contains(self)
    }

    /// The cube of level `level <= self.level` containing `self`.
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        assert!(level <= self.level);
        let shift = self.level - level;
        Self {
            level,
            index: self.index.iter().map(|&i| i >> shift).collect(),
        }
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        (self.level > 0).then(|| self.ancestor(self.level - 1))
    }

    /// Child selected by `bits`, where bit `d-1-j` picks the upper half along axis `j`.
    pub fn child(&self, bits: usize) -> DyadicCube {
        let d = self.dim();
        assert!(bits < (1 << d) && self.level < MAX_LEVEL);
        Self {
            level: self.level + 1,
            index: self
                .index
                .iter()
                .enumerate()
                .map(|(j, &i)| 2 * i + ((bits >> (d - 1 - j)) & 1) as u64)
                .collect(),
        }
    }

    pub fn children(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        (0..1usize << self.dim()).map(move |b| self.child(b))
    }

    /// Position of this cube among its siblings, in the `child` bit convention.
    pub fn child_bits(&self) -> usize {
        let d = self.dim();
        self.index
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &i)| acc | (((i & 1) as usize) << (d - 1 - j)))
    }

    /// The descendant at `level` sharing this cube's lower corner.
    pub fn lower_corner_descendant(&self, level: u32) -> DyadicCube {
        assert!(level >= self.level && level <= MAX_LEVEL);
        let shift = level - self.level;
        Self {
            level,
            index: self.index.iter().map(|&i| i << shift).collect(),
        }
    }

    /// The descendant at `level` sharing this cube's upper corner.
    pub fn upper_corner_descendant(&self, level: u32) -> DyadicCube {
        assert!(level >= self.level && level <= MAX_LEVEL);
        let shift = level - self.level;
        Self {
            level,
            index: self
                .index
                .iter()
                .map(|&i| (i << shift) + ((1u64 << shift) - 1))
                .collect(),
        }
    }

    /// Row-major position among all cubes of the same level (first axis slowest).
    pub fn flat_index(&self) -> usize {
        let side = 1usize << self.level;
        self.index
            .iter()
            .fold(0usize, |acc, &i| acc * side + i as usize)
    }

    pub fn from_flat(d: usize, level: u32, flat: usize) -> DyadicCube {
        let side_bits = level as usize;
        let mask = (1usize << side_bits) - 1;
        let mut index = vec![0u64; d];
        for j in (0..d).rev() {
            index[j] = ((flat >> ((d - 1 - j) * side_bits)) & mask) as u64;
        }
        Self { level, index }
    }

    /// All cubes of `level` in row-major order.
    pub fn all(d: usize, level: u32) -> impl Iterator<Item = DyadicCube> {
        let n = 1usize << (level as usize * d);
        (0..n).map(move |f| DyadicCube::from_flat(d, level, f))
    }

    /// Lower corner as a point in `[0,1)^d`.
    pub fn corner(&self) -> Vec<f64> {
        let h = (-(self.level as f64)).exp2();
        self.index.iter().map(|&i| i as f64 * h).collect()
    }
}

/// Row-major iteration over the integer box `prod_j [lo_j, lo_j + len)`
/// embedded in a grid of side `side`; yields flat indices.
pub(crate) fn box_cells(d: usize, side: usize, lo: &[usize], len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len.pow(d as u32));
    let mut offs = vec![0usize; d];
    loop {
        let flat = (0..d).fold(0usize, |acc, j| acc * side + lo[j] + offs[j]);
        out.push(flat);
        let mut j = d;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            offs[j] += 1;
            if offs[j] < len {
                break;
            }
            offs[j] = 0;
        }
    }
}
