//! Exact solution workbench for the one-dimensional supersymmetric t-J chain
//! with generic open boundaries.
//!
//! Layers, bottom-up:
//! - [`graded`]: Z2-graded tensor algebra and operator polynomials.
//! - [`kernels`]: R/r-matrices, K-matrices, gauges and relation checks.
//! - [`transfer`]: monodromies, transfer matrices, Hamiltonians, dense ED.
//! - [`tq`]: the nested inhomogeneous T-Q relation, Bethe equations, energy.
//! - [`roots`]: Newton solver and spectrum matching for the Bethe equations.
//! - [`states`]: nested Bethe states and their eigenvector certificates.
//! - [`tables`]: published roots and energies for two- and three-site chains.

pub mod error;
pub mod graded;
pub mod kernels;
pub mod roots;
pub mod states;
pub mod tables;
pub mod tq;
pub mod transfer;

pub use error::{Error, Result};
