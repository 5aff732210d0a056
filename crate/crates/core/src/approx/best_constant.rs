use rayon::prelude::*;

use crate::dyadic::ValueHistogram;
use crate::error::{param_err, Result};
use crate::numeric::CompensatedSum;

/// Histograms with more distinct values than this are enumerated in parallel.
const PARALLEL_ENUMERATION: usize = 2048;

fn err_pow(entries: &[(f64, f64)], xi: f64, p: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &(v, w) in entries {
        let diff = (v - xi).abs();
        if diff != 0.0 {
            acc.add(w * if p == 1.0 { diff } else { diff.powf(p) });
        }
    }
    acc.value()
}

/// Best constant approximation in `L_p`: returns `(xi, min_xi sum w |v - xi|^p)`.
///
/// For `p <= 1` a value carrying at least half of the total measure is
/// returned directly, since it is always optimal. Otherwise the minimizer is
/// searched among the data values (the objective is concave between them)
/// for `p < 1`, taken as the weighted median for `p = 1` and the mean for
/// `p = 2`, and found by bisection on the monotone derivative for other
/// `p > 1`. Ties go to the smallest minimizing value.
pub fn best_constant_error(h: &ValueHistogram, p: f64) -> Result<(f64, f64)> {
    if h.is_empty() {
        return param_err("best constant of an empty histogram");
    }
    if !(p > 0.0 && p.is_finite()) {
        return param_err(format!("p must be positive and finite, got {p}"));
    }
    let e = h.entries();
    if e.len() == 1 {
        return Ok((e[0].0, 0.0));
    }
    let total = h.total_measure();
    if p <= 1.0 {
        if let Some(&(v, _)) = e.iter().find(|&&(_, w)| 2.0 * w >= total) {
            return Ok((v, err_pow(e, v, p)));
        }
    }
    let xi = if p < 1.0 {
        let errs: Vec<f64> = if e.len() > PARALLEL_ENUMERATION {
            e.par_iter().map(|&(v, _)| err_pow(e, v, p)).collect()
        } else {
            e.iter().map(|&(v, _)| err_pow(e, v, p)).collect()
        };
        let mut best = 0;
        for (i, &x) in errs.iter().enumerate() {
            if x < errs[best] {
                best = i;
            }
        }
        return Ok((e[best].0, errs[best]));
    } else if p == 1.0 {
        weighted_median(e, total)
    } else if p == 2.0 {
        let mut acc = CompensatedSum::new();
        for &(v, w) in e {
            acc.add(v * w);
        }
        acc.value() / total
    } else {
        bisect_minimizer(e, p)
    };
    Ok((xi, err_pow(e, xi, p)))
}

/// Smallest value whose cumulative measure reaches half the total.
fn weighted_median(e: &[(f64, f64)], total: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &(v, w) in e {
        acc.add(w);
        if 2.0 * acc.value() >= total {
            return v;
        }
    }
    e[e.len() - 1].0
}

/// Root of `xi -> sum w sign(xi - v) |xi - v|^(p-1)` for `p > 1`.
fn bisect_minimizer(e: &[(f64, f64)], p: f64) -> f64 {
    let slope = |xi: f64| {
        let mut acc = CompensatedSum::new();
        for &(v, w) in e {
            let diff = xi - v;
            if diff != 0.0 {
                acc.add(w * diff.signum() * diff.abs().powf(p - 1.0));
            }
        }
        acc.value()
    };
    let (mut lo, mut hi) = (e[0].0, e[e.len() - 1].0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (elo, ehi) = (err_pow(e, lo, p), err_pow(e, hi, p));
    if elo <= ehi {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(f64, f64)]) -> ValueHistogram {
        ValueHistogram::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn examples() {
        let h = hist(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(best_constant_error(&h, 2.0).unwrap(), (0.5, 0.25));
        let (xi, e) = best_constant_error(&h, 0.5).unwrap();
        assert_eq!(xi, 0.0);
        assert!((e - 0.5).abs() < 1e-15);
        let h = hist(&[(-3.0, 0.2), (5.0, 0.6), (7.0, 0.2)]);
        for p in [0.3, 0.7, 1.0] {
            assert_eq!(best_constant_error(&h, p).unwrap().0, 5.0);
        }
        assert!(best_constant_error(&hist(&[]), 1.0).is_err());
    }

    #[test]
    fn half_measure_value_wins_over_smaller_median() {
        let h = hist(&[(0.0, 0.25), (1.0, 0.25), (2.0, 0.5)]);
        let (xi, e) = best_constant_error(&h, 1.0).unwrap();
        assert_eq!(xi, 2.0);
        assert_eq!(e, 0.75);
    }

    #[test]
    fn general_p_bisection() {
        let h = hist(&[(0.0, 0.3), (1.0, 0.3), (4.0, 0.4)]);
        let p = 1.5;
        let (_, e) = best_constant_error(&h, p).unwrap();
        let grid = (0..=40_000)
            .map(|i| err_pow(h.entries(), i as f64 * 1e-4, p))
            .fold(f64::INFINITY, f64::min);
        assert!(e <= grid + 1e-12 && grid - e < 1e-7);
    }
}
