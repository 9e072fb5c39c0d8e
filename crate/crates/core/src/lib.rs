//! Numerical core for sampling-based MaxCut optimization over quantum-relaxed
//! Hamiltonians.
//!
//! The pipeline runs entirely on classical hardware:
//!
//! 1. [`graph`]: instances, greedy coloring and exact/heuristic cut oracles.
//! 2. [`encoding`]: packing up to three variables per qubit and building the
//!    relaxed cost [`Observable`](encoding::Observable).
//! 3. [`engine`]: matrix-free statevector numerics (Krylov exponentials,
//!    Lanczos ground states, basis sampling).
//! 4. [`ansatz`]: linear angle schedules and the parameter-setting procedures.
//! 5. [`qsci`]: subspace selection from samples and effective-Hamiltonian
//!    diagonalization.
//! 6. [`decode`]: Pauli rounding and approximation ratios.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! experiment orchestration live in the `sqoa` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ansatz;
pub mod decode;
pub mod encoding;
pub mod engine;
mod error;
pub mod graph;
pub mod linalg;
pub mod qsci;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;
