use rand::{Rng, SeedableRng};
use rand_distr::{Distribution as _, StandardNormal, Uniform};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::dyadic::{cell_count, DyadicStepFunction, DEFAULT_CELL_BUDGET};
use crate::error::Result;

/// Value distribution of random step functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform on `[-1, 1]`.
    Uniform,
    StandardNormal,
}

/// xoshiro256++ whose state is expanded from `seed` by splitmix64.
pub fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Seed of the `stream`-th independent instance derived from `seed`
/// (splitmix64 finalizer of the combined words).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn random_values<R: Rng>(rng: &mut R, n: usize, dist: Distribution) -> Vec<f64> {
    match dist {
        Distribution::Uniform => {
            let u = Uniform::new_inclusive(-1.0, 1.0);
            (0..n).map(|_| u.sample(rng)).collect()
        }
        Distribution::StandardNormal => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
    }
}

/// Random function on `T_m^d`, fully determined by `seed`.
pub fn random_step(seed: u64, d: usize, m: u32, dist: Distribution) -> Result<DyadicStepFunction> {
    let n = cell_count(d, m, DEFAULT_CELL_BUDGET)?;
    let mut rng = rng_from_seed(seed);
    DyadicStepFunction::new(d, m, random_values(&mut rng, n, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism() {
        let a = random_step(7, 2, 3, Distribution::Uniform).unwrap();
        assert_eq!(a, random_step(7, 2, 3, Distribution::Uniform).unwrap());
        assert_ne!(a, random_step(8, 2, 3, Distribution::Uniform).unwrap());
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }

    #[test]
    fn uniform_mean() {
        let mut rng = rng_from_seed(12345);
        let v = random_values(&mut rng, 100_000, Distribution::Uniform);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 0.02);
        assert!(v.iter().all(|x| (-1.0..=1.0).contains(x)));
    }
}
