//! Dense tensor-structured linear algebra over labeled subsystems.
//!
//! Every operator carries a [`TensorLayout`]; gates, projectors and partial
//! traces address subsystems by label and never by raw index arithmetic.

mod layout;
mod operator;
mod sampling;
mod spectral;

pub use layout::{Subsystem, TensorLayout, MAX_TOTAL_DIM};
pub use operator::{
    born_probabilities, computational_probabilities, embed_operator, is_complete_povm,
    partial_trace, tensor_product, trace_norm_distance, DensityOperator, PureState,
};

pub use sampling::sample_outcome;
pub use spectral::{eigh, eigvals_hermitian, hermitian_deviation, symmetrize, trace_norm};
pub(crate) use spectral::eigvals_unchecked;

pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
