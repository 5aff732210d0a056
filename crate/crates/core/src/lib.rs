//! Haar systems on the unit cube, dyadic step functions, and Besov quasi-norms
//! evaluated through best approximation, moduli of smoothness and wavelet
//! coefficients.

pub mod approx;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod families;
pub mod format;
pub mod haar;
pub mod numeric;
pub mod regimes;
pub mod sequence;

pub use error::{Error, Result};
