//! Quantum error correction for relativistic summoning.
//!
//! A qubit state must be produced at whichever of N spacetime "reveal" points
//! corresponds to an externally chosen "request" point. This crate builds the
//! CSS code that solves the task with one qubit per edge of a complete graph,
//! synthesizes its encoding and erasure-decoding circuits, simulates them on
//! dense statevectors, models the Minkowski causal structure of the diamond
//! configuration, and runs the full routing protocol end to end.
//!
//! Module map:
//! - [`gf2`]: bit-packed GF(2) vectors/matrices, edge indexing of K_n.
//! - [`code`]: the summoning CSS code, its verification, and the CWS
//!   comparison code.
//! - [`circuits`]: encoder/decoder/graph-state synthesis and the circuit
//!   text format.
//! - [`simulator`]: dense statevector execution, partial trace, fidelities.
//! - [`spacetime`]: events, causal order, diamond configurations.
//! - [`protocol`]: qubit routing and the summoning simulation itself.

pub mod circuits;
pub mod code;
pub mod gf2;
pub mod protocol;
pub mod simulator;
pub mod spacetime;
