//! Dyadic cubes and piecewise-constant functions on dyadic partitions.

mod cube;
mod dense;
mod histogram;
mod sparse;

pub use cube::{DyadicCube, MAX_DIM, MAX_LEVEL};
pub use dense::{cell_count, DyadicStepFunction, DEFAULT_CELL_BUDGET};
pub use histogram::ValueHistogram;
pub use sparse::{Atom, LogCoefficient, SparseStepFunction};

pub(crate) use cube::check_dim;

use crate::error::{param_err, Result};

/// Common interface of dense and sparse step functions, enough to evaluate
/// every approximation quantity without densifying.
pub trait StepFunction {
    fn dim(&self) -> usize;

    /// Level beyond which the function is constant on every cube.
    fn finest_level(&self) -> u32;

    /// `log2 ||f||_p^p`, which stays finite where the power itself would overflow.
    fn log2_lp_norm_pow(&self, p: f64) -> f64;

    fn value_histogram(&self, cube: &DyadicCube) -> ValueHistogram;

    /// Cubes of `level` outside of which the function is constant on every
    /// level-`level` cube. May over-report.
    fn nonconstant_cubes(&self, level: u32) -> Vec<DyadicCube>;

    fn average_project(&self, k: u32) -> Result<DyadicStepFunction>;

    fn to_dense(&self) -> Result<DyadicStepFunction>;
}

impl StepFunction for DyadicStepFunction {
    fn dim(&self) -> usize {
        DyadicStepFunction::dim(self)
    }

    fn finest_level(&self) -> u32 {
        self.level()
    }

    fn log2_lp_norm_pow(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).log2()
    }

    fn value_histogram(&self, cube: &DyadicCube) -> ValueHistogram {
        DyadicStepFunction::value_histogram(self, cube)
    }

    fn nonconstant_cubes(&self, level: u32) -> Vec<DyadicCube> {
        if level >= self.level() {
            return Vec::new();
        }
        DyadicCube::all(self.dim(), level).collect()
    }

    fn average_project(&self, k: u32) -> Result<DyadicStepFunction> {
        Ok(DyadicStepFunction::average_project(self, k))
    }

    fn to_dense(&self) -> Result<DyadicStepFunction> {
        Ok(self.clone())
    }
}

impl StepFunction for SparseStepFunction {
    fn dim(&self) -> usize {
        SparseStepFunction::dim(self)
    }

    fn finest_level(&self) -> u32 {
        SparseStepFunction::finest_level(self)
    }

    fn log2_lp_norm_pow(&self, p: f64) -> f64 {
        SparseStepFunction::log2_lp_norm_pow(self, p)
    }

    fn value_histogram(&self, cube: &DyadicCube) -> ValueHistogram {
        SparseStepFunction::value_histogram(self, cube)
    }

    fn nonconstant_cubes(&self, level: u32) -> Vec<DyadicCube> {
        SparseStepFunction::nonconstant_cubes(self, level)
    }

    fn average_project(&self, k: u32) -> Result<DyadicStepFunction> {
        SparseStepFunction::average_project(self, k)
    }

    fn to_dense(&self) -> Result<DyadicStepFunction> {
        self.densify(self.finest_level())
    }
}

/// `||f||_{L_p}` for `p > 0`.
pub fn lp_quasinorm<F: StepFunction + ?Sized>(f: &F, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return param_err(format!("p must be a positive finite number, got {p}"));
    }
    Ok((f.log2_lp_norm_pow(p) / p).exp2())
}
