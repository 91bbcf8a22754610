//! Conformal Killing-Yano forms on metric Lie algebras.
//!
//! Everything is left-invariant, so a Lie group with a left-invariant metric is
//! represented by its Lie algebra: structure constants plus a Gram matrix.

pub mod catalog;
pub mod cky;
pub mod connection;
pub mod error;
pub mod exact;
pub mod forms;
pub mod json;
pub mod liealg;
pub mod linalg;
pub mod multi_index;
pub mod verify;

pub use connection::{holonomy_algebra, levi_civita, Connection, HolonomyReport};
pub use error::{Error, Result};
pub use forms::PForm;
pub use liealg::{Bracket, Endo, MetricLieAlgebra, ToleranceConfig, Vector};
