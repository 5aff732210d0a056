use crate::dyadic::{cell_count, DyadicCube, DyadicStepFunction, SparseStepFunction, DEFAULT_CELL_BUDGET};
use crate::error::{param_err, Result};

/// Index of a function in the isotropic Haar system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HaarIndex {
    /// The constant `chi_{I^d}`.
    Scaling,
    /// The wavelet of block `level >= 1` supported on `parent` (a cube of
    /// level `level - 1`). Bit `d-1-j` of `pattern` marks axis `j` as a
    /// wavelet factor; the remaining axes carry the indicator.
    Wavelet { level: u32, parent: DyadicCube, pattern: usize },
}

impl HaarIndex {
    pub fn wavelet(parent: DyadicCube, pattern: usize) -> Result<Self> {
        let d = parent.dim();
        if pattern == 0 || pattern >= 1 << d {
            return param_err(format!("pattern {pattern} is not a nonzero element of {{0,1}}^{d}"));
        }
        Ok(Self::Wavelet { level: parent.level() + 1, parent, pattern })
    }

    pub fn level(&self) -> u32 {
        match self {
            Self::Scaling => 0,
            Self::Wavelet { level, .. } => *level,
        }
    }

    /// Measure of the support.
    pub fn support_measure(&self, d: usize) -> f64 {
        match self {
            Self::Scaling => 1.0,
            Self::Wavelet { parent, .. } => {
                debug_assert_eq!(parent.dim(), d);
                parent.measure()
            }
        }
    }
}

/// Sign of the wavelet with `pattern` on the child `child_bits` of its parent.
#[inline]
pub fn pattern_sign(pattern: usize, child_bits: usize) -> f64 {
    if (pattern & child_bits).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The Haar function as a sum of cube indicators.
pub fn haar_function(d: usize, idx: &HaarIndex) -> Result<SparseStepFunction> {
    let mut f = SparseStepFunction::new(d)?;
    match idx {
        HaarIndex::Scaling => f.push_f64(DyadicCube::unit(d), 1.0),
        HaarIndex::Wavelet { parent, pattern, .. } => {
            if parent.dim() != d || *pattern == 0 || *pattern >= 1 << d {
                return param_err("wavelet index does not match the dimension");
            }
            for bits in 0..1usize << d {
                f.push_f64(parent.child(bits), pattern_sign(*pattern, bits));
            }
        }
    }
    Ok(f)
}

/// Orthoprojection coefficients `lambda_h = <f,h>/<h,h>` of the isotropic Haar
/// expansion, for all blocks `0..=K`.
///
/// `levels[0]` holds the scaling coefficient. Block `k >= 1` stores
/// `(2^d - 1) 2^((k-1)d)` values, lexicographic in (parent, pattern), at
/// position `parent_flat * (2^d - 1) + pattern - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarCoefficients {
    d: usize,
    levels: Vec<Vec<f64>>,
}

impl HaarCoefficients {
    /// All-zero coefficients for blocks `0..=max_level`.
    pub fn zeros(d: usize, max_level: u32) -> Result<Self> {
        crate::dyadic::check_dim(d)?;
        let mut levels = vec![vec![0.0]];
        let per = (1usize << d) - 1;
        for k in 1..=max_level {
            let parents = cell_count(d, k - 1, DEFAULT_CELL_BUDGET)?;
            levels.push(vec![0.0; parents * per]);
        }
        Ok(Self { d, levels })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Deepest block `K`.
    pub fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn scaling(&self) -> f64 {
        self.levels[0][0]
    }

    /// Coefficients of block `k` in storage order.
    pub fn level(&self, k: u32) -> &[f64] {
        &self.levels[k as usize]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    fn position(&self, idx: &HaarIndex) -> Option<(usize, usize)> {
        match idx {
            HaarIndex::Scaling => Some((0, 0)),
            HaarIndex::Wavelet { level, parent, pattern } => {
                if *level as usize >= self.levels.len() || parent.dim() != self.d {
                    return None;
                }
                let per = (1usize << self.d) - 1;
                Some((*level as usize, parent.flat_index() * per + pattern - 1))
            }
        }
    }

    /// Coefficient of `idx` (zero beyond the stored blocks).
    pub fn get(&self, idx: &HaarIndex) -> f64 {
        self.position(idx).map_or(0.0, |(k, i)| self.levels[k][i])
    }

    pub fn set(&mut self, idx: &HaarIndex, value: f64) -> Result<()> {
        match self.position(idx) {
            Some((k, i)) => {
                self.levels[k][i] = value;
                Ok(())
            }
            None => param_err("index outside the stored blocks"),
        }
    }

    /// Index stored at `position` of block `k`.
    pub fn index_at(&self, k: u32, position: usize) -> HaarIndex {
        if k == 0 {
            return HaarIndex::Scaling;
        }
        let per = (1usize << self.d) - 1;
        let parent = DyadicCube::from_flat(self.d, k - 1, position / per);
        HaarIndex::Wavelet { level: k, parent, pattern: position % per + 1 }
    }

    /// All `(index, coefficient)` pairs in block order.
    pub fn iter(&self) -> impl Iterator<Item = (HaarIndex, f64)> + '_ {
        self.levels.iter().enumerate().flat_map(move |(k, lv)| {
            lv.iter()
                .enumerate()
                .map(move |(i, &v)| (self.index_at(k as u32, i), v))
        })
    }

    /// Copy in which every coefficient is multiplied by `weight(index)`.
    pub fn map_weighted(&self, mut weight: impl FnMut(&HaarIndex) -> f64) -> Self {
        let mut out = self.clone();
        for (k, lv) in out.levels.iter_mut().enumerate() {
            for (i, v) in lv.iter_mut().enumerate() {
                let w = weight(&self.index_at(k as u32, i));
                *v = if w == 0.0 { 0.0 } else { *v * w };
            }
        }
        out
    }

    /// Keeps the blocks for which `keep(k)` holds.
    pub fn select_levels(&self, keep: impl Fn(u32) -> bool) -> Self {
        let mut out = self.clone();
        for (k, lv) in out.levels.iter_mut().enumerate() {
            if !keep(k as u32) {
                lv.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        out
    }
}

/// Flat offsets of the `2^d` children relative to the lower-corner child, in
/// a grid of side `side`.
fn child_offsets(d: usize, side: usize) -> Vec<usize> {
    (0..1usize << d)
        .map(|bits| (0..d).fold(0, |acc, j| acc * side + ((bits >> (d - 1 - j)) & 1)))
        .collect()
}

/// Flat index in the level-`k` grid of the lower-corner child of level-`k-1` cell `parent`.
fn first_child(d: usize, k: u32, parent: usize) -> usize {
    let pbits = (k - 1) as usize;
    let mask = (1usize << pbits) - 1;
    let side = 1usize << k;
    (0..d).fold(0, |acc, j| acc * side + 2 * ((parent >> ((d - 1 - j) * pbits)) & mask))
}

/// Forward local transform on `2^d` child values: one averaging butterfly
/// `(a, b) -> ((a+b)/2, (a-b)/2)` per axis, axis 0 first. Afterwards slot `e`
/// holds the coefficient of pattern `e` (slot 0 is the mean).
fn forward_local(buf: &mut [f64], d: usize) {
    for j in 0..d {
        let bit = 1usize << (d - 1 - j);
        for e in 0..buf.len() {
            if e & bit == 0 {
                let (a, b) = (buf[e], buf[e | bit]);
                buf[e] = 0.5 * (a + b);
                buf[e | bit] = 0.5 * (a - b);
            }
        }
    }
}

fn inverse_local(buf: &mut [f64], d: usize) {
    for j in (0..d).rev() {
        let bit = 1usize << (d - 1 - j);
        for e in 0..buf.len() {
            if e & bit == 0 {
                let (x, y) = (buf[e], buf[e | bit]);
                buf[e] = x + y;
                buf[e | bit] = x - y;
            }
        }
    }
}

/// Isotropic Haar analysis of a function on `T_m^d`; the result has `K = m`.
pub fn analyze(f: &DyadicStepFunction) -> HaarCoefficients {
    let d = f.dim();
    let m = f.level();
    let n = 1usize << d;
    let per = n - 1;
    let mut levels = vec![Vec::new(); m as usize + 1];
    let mut cur = f.values().to_vec();
    let mut buf = vec![0.0; n];
    for k in (1..=m).rev() {
        let side = 1usize << k;
        let offs = child_offsets(d, side);
        let parents = cur.len() >> d;
        let mut coarse = vec![0.0; parents];
        let mut lam = vec![0.0; parents * per];
        for p in 0..parents {
            let base = first_child(d, k, p);
            for (slot, &o) in buf.iter_mut().zip(&offs) {
                *slot = cur[base + o];
            }
            forward_local(&mut buf, d);
            coarse[p] = buf[0];
            lam[p * per..(p + 1) * per].copy_from_slice(&buf[1..]);
        }
        levels[k as usize] = lam;
        cur = coarse;
    }
    levels[0] = cur;
    HaarCoefficients { d, levels }
}

/// `sum_h lambda_h h` on `T_m^d`, `m >= K`.
pub fn synthesize(c: &HaarCoefficients, m: u32) -> Result<DyadicStepFunction> {
    let d = c.d;
    let kmax = c.max_level();
    if m < kmax {
        return param_err(format!("synthesis level {m} is below the coefficient depth {kmax}"));
    }
    cell_count(d, m, DEFAULT_CELL_BUDGET)?;
    let n = 1usize << d;
    let per = n - 1;
    let mut cur = vec![c.scaling()];
    let mut buf = vec![0.0; n];
    for k in 1..=kmax {
        let side = 1usize << k;
        let offs = child_offsets(d, side);
        let lam = &c.levels[k as usize];
        let mut fine = vec![0.0; cur.len() << d];
        for (p, &avg) in cur.iter().enumerate() {
            buf[0] = avg;
            buf[1..].copy_from_slice(&lam[p * per..(p + 1) * per]);
            inverse_local(&mut buf, d);
            let base = first_child(d, k, p);
            for (&v, &o) in buf.iter().zip(&offs) {
                fine[base + o] = v;
            }
        }
        cur = fine;
    }
    DyadicStepFunction::new(d, kmax, cur)?.refine(m)
}

/// `sum_{h in J} theta_h lambda_h(f) h`, with `theta_h = 1` when no signs are given.
pub fn partial_sum_subset(
    f: &DyadicStepFunction,
    subset: &[HaarIndex],
    signs: Option<&[f64]>,
) -> Result<DyadicStepFunction> {
    if let Some(s) = signs {
        if s.len() != subset.len() {
            return param_err("one sign per index is required");
        }
    }
    let full = analyze(f);
    let mut out = HaarCoefficients::zeros(f.dim(), f.level())?;
    for (i, idx) in subset.iter().enumerate() {
        let theta = signs.map_or(1.0, |s| s[i]);
        if idx.level() <= f.level() {
            let v = out.get(idx) + theta * full.get(idx);
            out.set(idx, v)?;
        }
    }
    synthesize(&out, f.level())
}

/// Partial sum over whole blocks: keeps block `k` when `keep(k)` holds.
pub fn partial_sum_blocks(f: &DyadicStepFunction, keep: impl Fn(u32) -> bool) -> Result<DyadicStepFunction> {
    synthesize(&analyze(f).select_levels(keep), f.level())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_function_examples() {
        let h = haar_function(2, &HaarIndex::Scaling).unwrap().densify(0).unwrap();
        assert_eq!(h.values(), &[1.0]);
        let h0 = haar_function(1, &HaarIndex::wavelet(DyadicCube::unit(1), 1).unwrap()).unwrap();
        assert_eq!(h0.densify(1).unwrap().values(), &[1.0, -1.0]);
        let h11 = haar_function(2, &HaarIndex::wavelet(DyadicCube::unit(2), 3).unwrap()).unwrap();
        assert_eq!(h11.densify(1).unwrap().values(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn constant_has_only_scaling() {
        let f = DyadicStepFunction::constant(2, 3, 2.5).unwrap();
        let c = analyze(&f);
        assert_eq!(c.scaling(), 2.5);
        assert!(c.iter().skip(1).all(|(_, v)| v == 0.0));
    }

    #[test]
    fn spike_table() {
        for d in 1..=3usize {
            let m = 3u32;
            let spike = DyadicStepFunction::from_fn(d, m, |c| {
                if c.index().iter().all(|&i| i == 0) {
                    ((m as usize * d) as f64).exp2()
                } else {
                    0.0
                }
            })
            .unwrap();
            let c = analyze(&spike);
            for (idx, v) in c.iter() {
                let expected = match &idx {
                    HaarIndex::Scaling => 1.0,
                    HaarIndex::Wavelet { level, parent, .. } => {
                        if parent.index().iter().all(|&i| i == 0) {
                            (((level - 1) as usize * d) as f64).exp2()
                        } else {
                            0.0
                        }
                    }
                };
                assert_eq!(v, expected, "{idx:?}");
            }
            assert_eq!(synthesize(&c, m).unwrap(), spike);
        }
    }

    #[test]
    fn index_roundtrip() {
        let c = HaarCoefficients::zeros(2, 3).unwrap();
        for k in 0..=3 {
            for i in 0..c.level(k).len() {
                let idx = c.index_at(k, i);
                assert_eq!(c.position(&idx), Some((k as usize, i)));
            }
        }
        assert_eq!(c.level(2).len(), 3 * 4);
    }
}
