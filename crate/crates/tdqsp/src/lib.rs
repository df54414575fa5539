//! Desk-scale block-encoding simulator for commuting time-dependent
//! Hamiltonians.
//!
//! The library assembles an end-to-end matrix-level construction of a block
//! encoding of `exp(−i ∫₀ᵗ H(s) ds)` for Hamiltonians `H(t) = Σᵢ γᵢ(t) Hᵢ`
//! whose terms pairwise commute, out of three layers:
//!
//! * [`matrix`] / [`pauli`] — dense complex linear algebra and Pauli strings;
//! * [`cheb`] / [`qsp`] / [`poly`] — Chebyshev machinery, signal-processing
//!   phase finding, and the polynomial approximation toolbox (Jacobi–Anger,
//!   rectangle, arcsin);
//! * [`blockenc`] / [`tdsim`] / [`models`] — block-encoding algebra, the
//!   time-dependent pipeline with brute-force propagator oracles, and the
//!   bundled lattice / Floquet / Ising-quench systems.
//!
//! The [`config`] and [`runner`] modules back the `tdqsp` command-line tool.

pub mod blockenc;
pub mod cheb;
pub mod coeffs;
pub mod config;
pub mod error;
pub mod matrix;
pub mod models;
pub mod pauli;
pub mod poly;
pub mod qsp;
pub mod runner;
pub mod tdsim;

pub use error::{Error, Result};
