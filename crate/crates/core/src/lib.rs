//! Qudit state-vector simulation of dense coding over non-symmetric channels.
//!
//! A sender holding a `p`-level particle and a receiver holding a `q`-level
//! particle (`p >= q`) share a maximally entangled pair. Local shift/phase
//! unitaries on the sender's side map the pair onto `p * q` orthonormal
//! generalized Bell states, so one joint measurement recovers `log2(p q)` bits.
//! The [`entanglement_transfer`] module shows how a symmetric `q x q` pair plus
//! a `p`-level ancilla on the sender's side becomes such a `p x q` channel.

pub mod bell_basis;
pub mod cli;
pub mod dense_coding;
pub mod entanglement_transfer;
pub mod protocol_runner;
pub mod tensor_core;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;
