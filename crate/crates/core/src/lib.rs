//! Potential-theory toolkit for two-phase harmonic transmission problems
//! `Δu = g dH^{n-1}|_Γ` on the unit ball, with graph interfaces `x_n = ψ(x')`.
//!
//! The crate builds solutions as single-layer potentials against the ball's
//! Green function, solves flat-interface companion problems, forms mean-value
//! averages, and measures interface regularity through dyadic linear-polynomial
//! fits. Everything is quadrature-backed and carries per-evaluation error
//! estimates; no meshes are involved.
//!
//! Module map:
//! - [`geometry`]: interface graphs, normals, surface measure, flatness and
//!   horizontality metrics, mean-value inclusion radii.
//! - [`potential`]: Green kernel of the ball, single-layer potentials, Poisson
//!   extensions, distributional verification.
//! - [`flat`]: flat-interface transmission solves, one-sided derivatives,
//!   reflection structure.
//! - [`averaging`]: ball averages `u_ε`, interface averages `g_ε`, and the
//!   identity `Δu_ε = g_ε`.
//! - [`stability`]: curved-vs-flat companion gap, barrier fields, the `η`
//!   imbalance.
//! - [`regularity`]: normalization, dyadic polynomial fitting, Hölder/LogLip
//!   seminorm estimation, Campanato norm assembly.

pub mod averaging;
pub mod error;
pub mod flat;
pub mod geometry;
pub mod point;
pub mod potential;
pub mod quad;
pub mod regularity;
pub mod stability;

pub use error::{Error, Result};
pub use point::{Ball, Point};
pub use quad::Estimate;
