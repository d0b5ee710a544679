//! Invariants of effective 3-forms on a 6-dimensional symplectic space and
//! checks for the Monge-Ampère structures they define on T*ℝ³.
//!
//! The pointwise algebra (exterior forms, the `⊤`/`⊥` operators, Hitchin's
//! K-map and pfaffian, the quadratic invariant q_ω, orbit classification)
//! is generic over an exact rational backend and `f64`. The field-level
//! machinery (exterior derivative, pullbacks, solution and integrability
//! checks, curvature) works on `f64` with polynomial coefficients handled
//! exactly where possible.

pub mod cases;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod fields;
pub mod hitchin;
pub mod invariants;
pub mod linalg;
pub mod scalar;
pub mod symplectic;

pub use classifier::{build_gcy, classify, GczStructure, InvariantReport, OrbitClass};
pub use error::{Error, Result};
pub use exterior::{Bivector6, ComplexKForm, KForm, MultiIndex, Vector6};
pub use hitchin::SplitPair;
pub use invariants::{QuadForm6, Signature};
pub use linalg::LinearMap6;
pub use scalar::{ComplexScalar, Rational, Scalar};
pub use symplectic::SymplecticSpace;
