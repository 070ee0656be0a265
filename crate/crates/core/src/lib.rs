//! Optimal channel fidelities and ancilla states for high-fidelity
//! KLM-style teleportation.
//!
//! The success probability of teleporting a qubit through a 2n-mode
//! single-rail ancilla is a quadratic form of the ancilla coefficients;
//! averaging it over the Bloch sphere gives the channel fidelity, another
//! quadratic form. This crate computes the optimal coefficient vectors and
//! fidelities through the closed-form angle condition, brackets them with
//! the bound inequalities, evaluates the large-n asymptotics, and checks
//! everything two independent ways: a self-contained Sturm-bisection
//! eigensolver and a brute-force Fock-space simulation of the protocol
//! itself (including the heralded beam-splitter circuit that prepares the
//! ancilla).
//!
//! Modules:
//! - [`spectral`]: tridiagonal matrices, the angle solver, the eigensolver
//!   oracle.
//! - [`ancilla`]: the uniform, fidelity-optimal, and `|+>`-optimal
//!   coefficient families.
//! - [`fidelity`]: success probabilities, channel fidelity, bounds,
//!   asymptotics, per-n reports.
//! - [`focksim`]: sparse Fock-state engine and the teleportation
//!   verification.
//! - [`prep`]: the heralded preparation circuit.
//! - [`verify`]: the one-shot property suite behind `verify-all`.

pub mod ancilla;
pub mod error;
pub mod fidelity;
pub mod focksim;
pub mod prep;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
