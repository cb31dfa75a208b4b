//! Geodesic flows of the metrics `A(t)² dt² + cosh²t dy²` on the hyperbolic
//! plane that carry a pair of extra polynomial integrals.
//!
//! The crate evaluates the metric family, builds the integrals `S₁`, `S₂`,
//! checks their commutation and Poisson algebra numerically, integrates the
//! geodesic flow and classifies when the metric extends to a global
//! Riemannian manifold.

pub mod brackets;
pub mod checks;
pub mod cli;
pub mod config;
pub mod family;
pub mod flow;
pub mod geometry;
pub mod integrals;
pub mod json;
pub mod numerics;
pub mod scalar;

pub use family::{FamilyError, MetricFamily, Parity};
pub use integrals::{eval_integrals, IntegralSystem, IntegralValues, PhasePoint};
