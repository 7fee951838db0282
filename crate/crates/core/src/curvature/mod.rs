//! Shape-operator stacks and the curvature invariants built from them.

mod contraction;
pub mod identities;
mod matrix;
mod newton;
mod slot;
mod stack;

pub use identities::Discrepancy;
pub use matrix::Matrix;
pub use newton::{
    h_r, mean_curvature_vector, mean_curvature_vector_direct, newton_alpha_direct, newton_direct, newton_recursive,
    s_r_direct, s_r_minor_oracle, NewtonTransform, NormalVector,
};
pub use slot::{lemma3_residual, slot_tensor, SlotTensor};
pub use stack::ShapeOperatorStack;
