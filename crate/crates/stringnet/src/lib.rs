//! Computational engine for spherical fusion categories given by explicit
//! coefficient data: F-matrix loading and validation, 6j-symbol tables and
//! their symmetries, gauge transformations and symmetrization searches, and
//! Levin-Wen plaquette operators on small honeycomb patches.
//!
//! All simple objects are assumed self-dual and every category is handled
//! purely at the coefficient level: fusion multiplicities `N`, quantum
//! dimensions, and the associativity matrices `F^x_{uvw}`. Morphisms never
//! appear explicitly; closed diagrams are evaluated by a fusion-path state
//! machine ([`levinwen::machine`]).

pub mod catcore;
pub mod cli;
pub mod expr;
pub mod levinwen;
pub mod report;
pub mod sixj;
pub mod symmetrize;
pub mod verify;

pub use catcore::{CategoryData, GaugeTransform, Label};
pub use verify::VerificationReport;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Dense complex matrix used for F-matrices, 6j blocks and operators.
pub type CMat = nalgebra::DMatrix<C64>;
