//! Equivariant analytic conjugacy of planar reversible vector fields to
//! Hamiltonian normal forms, computed in exact arithmetic.
//!
//! A vector field reversible under `R(u, v) = (u, -v)` with a nondegenerate
//! singular point at the origin is conjugate, by a map commuting with `R`, to
//! a Hamiltonian field with `H = F(x² + y²)` (center) or `H = -F(x² - y²)`
//! (saddle). This crate computes that conjugacy and `F` to any truncation
//! order, certifies the result symbolically and numerically, and reports
//! majorant bounds on the computed coefficients.

pub mod diagnostics;
pub mod field;
pub mod hamiltonian;
pub mod linear;
pub mod normalform;
pub mod parser;
pub mod report;
pub mod scalar;
pub mod series;
pub mod verify;

pub use diagnostics::{majorant_report, MajorantReport};
pub use field::{classify, EquilibriumKind, PlanarField};
pub use hamiltonian::HamiltonianNF;
pub use linear::LinearMap2;
pub use normalform::{compute_normal_form, NormalFormError, NormalFormResult};
pub use scalar::{Alg, FieldScalar, Rat, Scalar};
pub use series::{Axis, Series1, Series2};
pub use verify::{verify, VerificationReport, VerifyOptions};
