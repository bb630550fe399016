//! Dirichlet-biharmonic Steklov (DBS) eigenvalues on convex planar domains.
//!
//! The DBS eigenvalues `λ_n(Ω)` coincide with the dual eigenvalues `δ_n(Ω)`
//! of the boundary/interior mass ratio over harmonic functions. This crate
//! computes Rayleigh-Ritz upper bounds for `δ_n` over harmonic polynomial or
//! fundamental-solution trial spaces, compares them with the closed-form disk
//! spectrum, and runs the regular-polygon convergence study in which polygon
//! values tend to the disk's DBS values rather than its MDBS values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod exact_disk;
pub mod experiments;
pub mod geometry;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Disk, Domain, Point2, PolygonMode};
pub use solver::{compute_spectrum, Method, Spectrum};
