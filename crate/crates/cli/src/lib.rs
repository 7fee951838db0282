//! Verification suites for `newton-curv` and their reports.

pub mod report;
pub mod suites;

pub use report::{Aggregate, CaseResult, CaseStatus, Parameters, SuiteReport};
pub use suites::{
    emit_theorem2_table, run_algebra_suite, run_geometry_suite, run_named_geometry_suite, run_theorem1_suite,
    AlgebraConfig, GeometryConfig, Mode, Theorem1Config, Theorem2Row, Theorem2Table, Tolerances,
};
