//! Model Riemannian manifolds of constant curvature with a distribution `F`,
//! evaluated pointwise on a chart and integrated by quadrature.

mod builtin;
mod chart;
mod connection;
mod frame;
mod pointwise;
mod quadrature;
mod totals;

pub use builtin::{
    builtin_geometry, geometry_from_json, GeometrySpec, ModelGeometry, SpanSpec, BUILTIN_GEOMETRIES, DEFAULT_TILT,
};
pub use chart::{Axis, ChartGeometry, ConstantSpan, DistributionSpec, FlatTorus, RoundS3, RoundS5, TiltedLine};
pub use connection::{christoffel, riemann, sectional_curvature, sectional_curvature_residual, Christoffel, Riemann};
pub use frame::{
    adapted_frame, frame_point, shape_operators, totally_geodesic_residual, AdaptedFramePoint, FdOptions, FrameField,
    FrameSeeds, GramSchmidtFrame,
};
pub use pointwise::{
    divergence_numeric, divergence_with, lemma2_report, theorem3_prediction, theorem3_residual, theorem3_sample,
    verify_lemma2, Lemma2Report, Theorem3Sample, TOTALLY_GEODESIC_TOL,
};
pub use quadrature::{
    collapsed_nodes, evaluate_nodes, evaluate_on, integrate_many, integrate_scalar, invariant_axes, pairwise_sum,
    quadrature_nodes, sample_points, weighted_sum, Node, Resolution,
};
pub use totals::{
    corollary1_residual, curvature_totals, divergence_integral, generalized_binomial, recurrence_check,
    recurrence_coefficient, theorem2_closed_form, total_mean_curvature, ClosedFormCase, CurvatureTotals,
    RecurrenceCheck,
};
