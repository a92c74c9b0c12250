//! Embedding-aware parameter setting for Ising problems on annealing hardware.
//!
//! The crate turns logical Ising or mixed-SAT problems into physical problems
//! on a Chimera-shaped hardware graph, samples them with exact or simulated
//! annealing backends, decodes the readouts and computes figures of merit over
//! chain-coupling and spin-reversal sweeps.

pub mod annealer;
pub mod chimera;
pub mod corpus;
pub mod decode;
pub mod embedding;
pub mod error;
pub mod hardware;
pub mod harness;
pub mod metrics;
pub mod paramset;
pub mod problem;
pub mod reduction;
pub mod sat;
pub mod seed;

pub use error::{Error, Result};
