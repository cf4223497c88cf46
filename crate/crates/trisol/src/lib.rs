//! Certified parameter intervals and numerical multiplicity for
//! divergence-form elliptic Dirichlet problems
//!
//! ```text
//!   -div(a(x, ∇u)) = λ k(x) f(u)   in Ω,       u = 0   on ∂Ω.
//! ```
//!
//! The crate computes the explicit constants (κ, G₁, G₂, embedding bounds)
//! behind a three-critical-point multiplicity theorem for such problems,
//! certifies admissible λ-intervals from a witness pair (γ, δ), and then
//! exhibits multiple weak solutions numerically by energy minimization plus a
//! mountain-pass deformation between distinct minimizers.
//!
//! Modules follow the pipeline:
//!
//! - [`numerics`]: Gamma function, adaptive quadrature, 1-D minimization.
//! - [`geometry`]: domains (ball / box / user-described), the tent test
//!   function and its closed-form gradient energy.
//! - [`embedding`]: explicit Sobolev embedding constant bounds.
//! - [`model`]: operator specifications with structural spot-checks,
//!   nonlinearities with growth certificates, weights with certified bounds.
//! - [`theorem`]: the certified constants, hypothesis checks and admissible
//!   intervals.
//! - [`solver`]: meshes, discrete energies, minimization, mountain pass.
//! - [`config`] / [`report`] / [`cli`]: JSON configuration, certificate
//!   documents, and the command-line front end.
//!
//! See the `examples/` directory for one runnable program per capability.

// pub mod cli;
// pub mod config;
pub mod embedding;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod instances;
pub mod model;
pub mod numerics;
// pub mod report;
// pub mod solver;
pub mod theorem;

pub use error::{Error, Result};
