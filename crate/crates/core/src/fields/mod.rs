//! Differential forms with variable coefficients on a 6-dim chart, and the
//! field-level checks built on them: exterior derivative, pullbacks,
//! Monge-Ampère operators, generalized solutions, closedness, integrability
//! and flatness.

mod form;
mod maps;
mod metric;
mod poly;
mod solutions;
mod structure;

pub use form::{d_exact, d_numeric, d_numeric_field, map_points, Chart, CoefFn, FormField, Point, SampleBox};
pub use maps::{is_symplectomorphism, is_symplectomorphism_exact, pullback_affine, pullback_map, DiffeoMap};
pub use metric::{flatness_check, Christoffel, FlatnessReport, MetricField, Riemann, DEFAULT_CURVATURE_TOL};
pub use poly::{Exponents, Polynomial};
pub use solutions::{
    check_generalized_solution, check_regular_solution, hessian_det, ma_operator, ma_operator_quadratic,
    GeneralizedSolutionReport, Point3, RegularSolutionReport, SectionMap, Submanifold3, DEFAULT_H,
    DEFAULT_SOLUTION_TOL,
};
pub use structure::{
    closedness_check, degeneracy_threshold, dual_field, gcy_integrability_check, lambda_field, normalized_field,
    q_metric, regime_scan, ClosednessReport, IntegrabilityReport,
};
