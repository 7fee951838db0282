//! Higher-order mean curvatures of distributions of arbitrary codimension.
//!
//! The crate computes the `r`th mean curvatures `S_r`, the generalized Newton
//! transformations `T_r` and `T_q^α`, and the mean curvature vector fields
//! `S_{r+1}` of a distribution `D` from the shape operators `A^α` of `D`
//! with respect to an orthonormal frame of the complementary distribution
//! `F`. Every quantity is available both from its defining generalized
//! Kronecker contraction and from the trace/recursion identities it
//! satisfies, so the two routes can be checked against each other.
//!
//! Modules:
//!
//! * [`multiindex`]: permutation signs, increasing tuples, the generalized
//!   Kronecker symbol.
//! * [`curvature`]: shape-operator stacks, `S_r`, Newton transformations,
//!   slot tensors and curvature identity residuals, generic over
//!   [`Scalar`] so the same code runs in `f64` and in exact rationals.
//! * [`exterior`]: sparse alternating forms and the Brito–Naveira forms
//!   `Γ_r`.
//! * [`geometry`]: chart-based model manifolds of constant curvature with a
//!   totally geodesic complementary distribution, pointwise frames, the
//!   divergence formula, and total curvatures by quadrature.

pub mod curvature;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod multiindex;
pub mod random;
pub mod scalar;

pub use curvature::{NewtonTransform, NormalVector, ShapeOperatorStack, SlotTensor};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
