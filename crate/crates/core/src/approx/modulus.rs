use rayon::prelude::*;

use super::BesovParams;
use crate::dyadic::{DyadicStepFunction, StepFunction};
use crate::error::{param_err, Result};
use crate::numeric::CompensatedSum;

/// Relative size below which trailing terms of the dyadic modulus sum are negligible.
const TAIL_TOL: f64 = 1e-9;
/// Extra levels beyond the grid that the modulus sum may visit.
const TAIL_CAP: u32 = 1000;

/// `||f(. + y) - f||_{L_p(I^d_y)}^p` for all grid shifts of a step function.
///
/// For a shift `y = (n + r) 2^-m` with `r in [0,1)^d` the integral is the
/// multilinear interpolation in `r` of its values at the integer shifts
/// around `n`, so suprema over shift boxes with grid-aligned corners are
/// attained at grid shifts.
#[derive(Clone, Debug)]
pub struct ModulusProfile {
    d: usize,
    m: u32,
    p: f64,
    /// Values at `n in [-R, R]^d`, `R = 2^m - 1`, row-major in `n + R`.
    shifts: Vec<f64>,
    /// `radius_max[r]` = max over `||n||_inf <= r`.
    radius_max: Vec<f64>,
}

impl ModulusProfile {
    pub fn new(f: &DyadicStepFunction, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return param_err(format!("p must be positive and finite, got {p}"));
        }
        let (d, m) = (f.dim(), f.level());
        let side = f.side();
        let r = side as i64 - 1;
        let width = (2 * r + 1) as usize;
        let count = width.pow(d as u32);
        let decode = |flat: usize| -> Vec<i64> {
            let mut n = vec![0i64; d];
            let mut rem = flat;
            for j in (0..d).rev() {
                n[j] = (rem % width) as i64 - r;
                rem /= width;
            }
            n
        };
        let w = f.cell_measure();
        let vals = f.values();
        // F(-n) = F(n), and -n sits at the mirrored flat position.
        let half: Vec<f64> = (0..=count / 2)
            .into_par_iter()
            .map(|flat| shift_sum(vals, d, side, &decode(flat), p) * w)
            .collect();
        let shifts: Vec<f64> = (0..count).map(|flat| half[flat.min(count - 1 - flat)]).collect();
        let mut radius_max = vec![0.0f64; r as usize + 1];
        for (flat, &v) in shifts.iter().enumerate() {
            let rad = decode(flat).iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as usize;
            radius_max[rad] = radius_max[rad].max(v);
        }
        for i in 1..radius_max.len() {
            radius_max[i] = radius_max[i].max(radius_max[i - 1]);
        }
        Ok(Self { d, m, p, shifts, radius_max })
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn at(&self, n: &[i64]) -> f64 {
        let r = (1i64 << self.m) - 1;
        if n.iter().any(|x| x.abs() > r) {
            return 0.0;
        }
        let width = 2 * r + 1;
        let flat = n.iter().fold(0i64, |acc, &x| acc * width + x + r);
        self.shifts[flat as usize]
    }

    /// `||Delta_y f||_p^p` at the grid shift `y = n 2^-m`.
    pub fn grid_shift_pow(&self, n: &[i64]) -> f64 {
        assert_eq!(n.len(), self.d);
        self.at(n)
    }

    /// `omega(r 2^-m, f)_p^p` for an integer `r >= 0`.
    pub fn omega_pow_grid(&self, r: u64) -> f64 {
        let top = self.radius_max.len() - 1;
        self.radius_max[(r as usize).min(top)]
    }

    /// `omega(2^-j, f)_p^p` for any `j >= 0`. Below the grid width the
    /// supremum is taken over the vertices `y in {-t, 0, t}^d`.
    pub fn omega_pow_dyadic(&self, j: u32) -> f64 {
        if j <= self.m {
            return self.omega_pow_grid(1u64 << (self.m - j));
        }
        let r = (-((j - self.m) as f64)).exp2();
        let d = self.d;
        let mut best = 0.0f64;
        let mut sigma = vec![0i64; d];
        for code in 1..3usize.pow(d as u32) {
            let mut c = code;
            for s in sigma.iter_mut().rev() {
                *s = (c % 3) as i64 - 1;
                c /= 3;
            }
            let support: Vec<usize> = (0..d).filter(|&i| sigma[i] != 0).collect();
            let mut acc = CompensatedSum::new();
            let mut delta = vec![0i64; d];
            for mask in 1..1usize << support.len() {
                for (b, &i) in support.iter().enumerate() {
                    delta[i] = if mask >> b & 1 == 1 { sigma[i] } else { 0 };
                }
                let on = mask.count_ones() as i32;
                let off = support.len() as i32 - on;
                acc.add(r.powi(on) * (1.0 - r).powi(off) * self.at(&delta));
            }
            best = best.max(acc.value());
        }
        best
    }
}

/// `sum_c |v(c + n) - v(c)|^p` over cells with `c + n` inside the grid.
fn shift_sum(vals: &[f64], d: usize, side: usize, n: &[i64], p: f64) -> f64 {
    let side_i = side as i64;
    let lo: Vec<i64> = n.iter().map(|&x| (-x).max(0)).collect();
    let hi: Vec<i64> = n.iter().map(|&x| side_i.min(side_i - x)).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return 0.0;
    }
    let offset = n.iter().fold(0i64, |acc, &x| acc * side_i + x);
    let mut acc = CompensatedSum::new();
    let mut c = lo.clone();
    loop {
        let base = c.iter().fold(0i64, |a, &x| a * side_i + x);
        let len = (hi[d - 1] - lo[d - 1]) as usize;
        let start = base as usize;
        let shifted = (base + offset) as usize;
        for i in 0..len {
            let diff = (vals[shifted + i] - vals[start + i]).abs();
            if diff != 0.0 {
                acc.add(if p == 1.0 { diff } else { diff.powf(p) });
            }
        }
        let mut j = d - 1;
        loop {
            if j == 0 {
                return acc.value();
            }
            j -= 1;
            c[j] += 1;
            if c[j] < hi[j] {
                break;
            }
            c[j] = lo[j];
        }
    }
}

/// `omega(t, f)_p` for `t` a positive multiple of the cell width, `t <= 1`.
pub fn modulus(f: &DyadicStepFunction, t: f64, p: f64) -> Result<f64> {
    let scaled = t * f.side() as f64;
    if !(t > 0.0 && t <= 1.0) || scaled.fract() != 0.0 {
        return param_err(format!("t = {t} is not a multiple of 2^-{} in (0, 1]", f.level()));
    }
    let prof = ModulusProfile::new(f, p)?;
    Ok(prof.omega_pow_grid(scaled as u64).powf(1.0 / p))
}

/// `(||f||_p^q + sum_{j>=0} (2^(js) omega(2^-j, f)_p)^q)^(1/q)`, summed until
/// three consecutive terms beyond the grid level are below `1e-9` of the total.
pub fn b_norm_modulus(f: &DyadicStepFunction, prm: &BesovParams) -> Result<f64> {
    let prof = ModulusProfile::new(f, prm.p)?;
    b_norm_from_profile(f, &prof, prm)
}

/// [`b_norm_modulus`] reusing a precomputed profile of `f` for `prm.p`.
pub fn b_norm_from_profile(f: &DyadicStepFunction, prof: &ModulusProfile, prm: &BesovParams) -> Result<f64> {
    prm.require_finite_q()?;
    if prof.p != prm.p || prof.m != f.level() {
        return param_err("modulus profile does not match the function or exponent");
    }
    let r = prm.q / prm.p;
    let mut total = CompensatedSum::new();
    total.add((r * f.log2_lp_norm_pow(prm.p)).exp2());
    let mut small = 0;
    for j in 0..=f.level() + TAIL_CAP {
        let w = prof.omega_pow_dyadic(j);
        let term = if w == 0.0 {
            0.0
        } else {
            (prm.q * j as f64 * prm.s + r * w.log2()).exp2()
        };
        total.add(term);
        if j > f.level() {
            if term <= TAIL_TOL * total.value() {
                small += 1;
                if small == 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    Ok(total.value().powf(1.0 / prm.q))
}

/// Exact `||f(. + y) - f||_{L_p(I^d_y)}^p` for an arbitrary real shift, by
/// splitting the domain into boxes on which both terms are constant.
pub fn shift_difference_pow(f: &DyadicStepFunction, y: &[f64], p: f64) -> Result<f64> {
    let d = f.dim();
    if y.len() != d {
        return param_err("shift dimension mismatch");
    }
    let side = f.side() as f64;
    let mut pieces: Vec<Vec<(f64, f64)>> = Vec::with_capacity(d);
    for &yj in y {
        let (a, b) = ((-yj).max(0.0), (1.0 - yj).min(1.0));
        if a >= b {
            return Ok(0.0);
        }
        let mut cuts = vec![a, b];
        for i in 0..=f.side() {
            for x in [i as f64 / side, i as f64 / side - yj] {
                if x > a && x < b {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        pieces.push(cuts.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect());
    }
    let mut acc = CompensatedSum::new();
    let mut pick = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut xs = vec![0.0; d];
    loop {
        let mut vol = 1.0;
        for j in 0..d {
            let (mid, len) = pieces[j][pick[j]];
            x[j] = mid;
            xs[j] = mid + y[j];
            vol *= len;
        }
        let diff = (f.value_at(&xs) - f.value_at(&x)).abs();
        if diff != 0.0 {
            acc.add(vol * diff.powf(p));
        }
        let mut j = d;
        loop {
            if j == 0 {
                return Ok(acc.value());
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] < pieces[j].len() {
                break;
            }
            pick[j] = 0;
        }
    }
}
