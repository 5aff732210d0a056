//! The isotropic Haar system `H^d` and the tensor-product system.

mod isotropic;
mod tensor;

pub use isotropic::{
    analyze, haar_function, partial_sum_blocks, partial_sum_subset, pattern_sign, synthesize, HaarCoefficients,
    HaarIndex,
};
pub use tensor::{
    block_order_d2, rank_one_project, tensor_analyze, tensor_function, tensor_synthesize, univariate_level,
    TensorCoefficients, TensorHaarIndex,
};
