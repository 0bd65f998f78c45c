//! Spectral laboratory for curved planar strips carrying a Dirichlet condition
//! on the inner edge (`u = 0`) and a Neumann condition on the outer edge
//! (`u = d`).
//!
//! The crate computes discrete eigenvalues below the essential-spectrum
//! threshold `π²/4d²` with a finite-element discretization of the strip's
//! quadratic form, and checks existence or absence of such eigenvalues
//! independently through explicit trial functions and a transverse
//! (cross-section) analysis.
//!
//! Module map:
//!
//! - [`geometry`]: curvature profiles, strips, curve reconstruction, self-intersection.
//! - [`transverse`]: Robin and Bessel cross-section eigenvalues, shooting oracle,
//!   the Robin comparison bound and the non-existence certificate.
//! - [`discretize`]: Q1 assembly of the stiffness/mass pencil on a truncated strip.
//! - [`eigensolve`]: shift-invert block Krylov eigensolver and bound-state detection.
//! - [`variational`]: trial functionals, closed-form bounds and existence certificates.
//! - [`scenario`]: JSON scenarios, presets and the batch runner behind the `dnstrip` binary.

pub mod discretize;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod scenario;
pub mod transverse;
pub mod variational;

pub use error::{Error, Result};
