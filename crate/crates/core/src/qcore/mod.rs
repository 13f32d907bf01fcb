//! Dense complex linear algebra and state constructors for small
//! bipartite systems.

mod haar;
mod matrix;
mod state;

pub use haar::{random_unitary, unitary_dim_for_len, unitary_from_unit_vector};
pub use matrix::{tensor_product, ComplexMatrix, C64};
pub use state::{
    gram_schmidt, maximally_entangled, partial_trace, projector, projector_onto, schmidt_state, DensityOperator,
    OrthonormalBasis, Party, PureState, UnitaryOperator,
};

pub(crate) use matrix::ZERO;
pub(crate) use state::partial_trace_matrix;
