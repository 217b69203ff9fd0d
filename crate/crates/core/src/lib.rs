//! Variational linear solving of the periodic advection-diffusion equation.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! 1. [`problem`] discretizes the PDE on a periodic grid and stacks the
//!    forward-Euler steps into one lower block-bidiagonal linear system.
//! 2. [`pauli`] expands the (reduced) system matrix in the Pauli-string basis.
//! 3. [`sim`] is a small statevector simulator that evaluates the circuits.
//! 4. [`vqls`] evaluates the local cost of the variational linear solver and
//!    drives it with the optimizer in [`spsa`].
//! 5. [`resources`] estimates problem size and qubit counts for global
//!    forecast configurations.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel ensembles live in the `vqls-cli` crate.
//!
//! Qubit ordering is fixed crate-wide: qubit 0 is the most significant bit
//! of an amplitude index, and character 0 of a Pauli label acts on qubit 0.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is the NaN-rejecting check used in validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod pauli;
pub mod problem;
pub mod resources;
pub mod sim;
pub mod spsa;
pub mod vqls;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use num_complex::Complex64;
