//! Single-wave factorization imaging for the Helmholtz equation.
//!
//! A Cauchy pair `(f, ∂_ν u)` measured on a circle `∂B` is turned into the
//! Dirichlet-to-Neumann map `Λ`, combined with a reference map `Λ̃` and
//! factorized to image a hidden object, recover boundary coefficients, and
//! reconstruct a convex polygon.

pub mod linalg;
pub mod specfun;
pub mod geometry;
pub mod potential;
pub mod forward;
pub mod factorization;
pub mod cli;
