//! Seeded experiments, growth fits and report emission.

mod fit;
mod rng;
mod run;

pub use fit::{fit_linear, fit_log2_slope, Fit};
pub use rng::{derive_seed, random_step, random_values, rng_from_seed, Distribution};
pub use run::{
    reference_classifications, run_experiment, sweep_lattice, Band, Check, Experiment, ExperimentConfig,
    GrowthReport, GrowthRow, Report, Row, Summary, SCHEMA_VERSION,
};
