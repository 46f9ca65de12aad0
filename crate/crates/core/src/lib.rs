//! Simulation and synthesis of measurement-assisted programmable quantum
//! processors.
//!
//! A processor is a fixed unitary `G` acting on a data register and a program
//! register, followed by a projective measurement of the program register.
//! The program state decides which instrument (and therefore which POVM) the
//! data register experiences. This crate provides:
//!
//! * [`qcore`]: small dense complex linear algebra (operators, states, partial
//!   traces, Pauli/Bell helpers, Hermitian eigensolver, SVD rank).
//! * [`processor`]: Kraus extraction, induced POVMs, outcome probabilities,
//!   post-measurement states and seeded multinomial sampling.
//! * [`qid`]: the quantum information distributor, its program encodings, the
//!   tetrahedral SIC-POVM and a brute-force CNOT circuit search.
//! * [`tomography`]: Gram matrices, informational completeness and linear
//!   inversion state reconstruction.
//! * [`vnmeas`]: co-programmability of von Neumann measurements, processor
//!   synthesis with zero-operator padding, and the relaxed shift construction.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod processor;
pub mod qcore;
pub mod qid;
pub mod tomography;
pub mod vnmeas;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use qcore::{DensityOperator, Operator, PureState};
