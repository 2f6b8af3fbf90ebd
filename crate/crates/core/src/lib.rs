//! Polytopal discontinuous Galerkin solver for the Kelvin-Voigt
//! thermo/poro-viscoelastic system.
//!
//! The displacement `u` and the generalized pressure `φ` (pore pressure or
//! temperature) are discretized with fully discontinuous polynomials on
//! polygonal meshes. Face coupling uses weighted symmetric interior penalty
//! terms with coefficient-weighted averages and harmonic-mean penalties, and
//! the semi-discrete system is advanced with Newmark-β or the coupled
//! Newmark-β-θ scheme.

pub mod assembly;
pub mod basis;
pub mod dg_forms;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod models;
pub mod quadrature;
pub mod scenarios;
pub mod simulation;
pub mod solver;
pub mod sparse;
pub mod timestepping;
pub mod verification;

pub use error::{Error, Result};
