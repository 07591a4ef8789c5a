//! Locally convex free diffusions `dX_t = dS_t − ½ DV(X_t) dt`, simulated with
//! Hermitian matrix models and checked against exact noncommutative
//! polynomial calculus.

pub mod matmodel;
pub mod ncpoly;
pub mod polylang;
pub mod sde;
pub mod laws;
pub mod convexity;
pub mod cli;
