//! Extremal families of step functions with closed-form norms.

mod nested;
mod scattered;
mod spike;
mod tensor_spike;

pub use nested::{nested_closed_form, nested_family, CoefficientRule, CubeChain, NestedNorms, NestedSpec};
pub use scattered::{scattered, scattered_closed_norms, scattered_projection, Placement, ScatteredNorms, ScatteredSpec, Selection};
pub use spike::{alternating_partial, spike, spike_closed_form, spike_pair, SpikePair};
pub use tensor_spike::{tensor_spike_pair, TensorSpike};

use crate::error::{Error, Result};

pub(crate) fn require_p_at_most_one(p: f64) -> Result<()> {
    if p > 1.0 {
        return Err(Error::Unsupported(format!(
            "closed forms rely on half-measure best constants and need p <= 1, got {p}"
        )));
    }
    Ok(())
}
