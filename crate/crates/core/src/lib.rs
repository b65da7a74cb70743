//! Geometry of 2-step nilpotent Lie groups with left-invariant indefinite
//! metrics, centred on groups of pseudo-H-type.
//!
//! * [`algebra`]: metric nilpotent Lie algebras, `J_z`, pseudo-H and
//!   pseudoregularity predicates.
//! * [`geometry`]: connection, curvature, Jacobi operator and geodesic
//!   velocity in the left-trivialization.
//! * [`analytic`]: closed-form conjugate loci and multiplicities.
//! * [`numeric`]: Jacobi-field integration and rank-drop detection of
//!   conjugate points, plus cross-validation against the closed forms.
//! * [`catalog`]: the built-in example algebras.
//! * [`io`] and [`cli`]: algebra files, reports and the command-line front end.

pub mod algebra;
pub mod analytic;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod io;
pub mod numeric;
pub mod ode;
pub mod roots;

pub use algebra::{AlgebraVector, CausalClass, MetricNilpotentAlgebra, Pseudoregularity, RawAlgebra};
pub use analytic::{Branch, ConjugatePoint, GeodesicInvariants, SolverConfig};
pub use error::{Error, Result};
pub use geometry::GeodesicIC;
