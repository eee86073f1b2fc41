//! Core of a stored-program quantum machine simulator.
//!
//! Quantum channels live in memory as Choi states ("programs"). Inputs are
//! written into a program's tail by a binary measurement and results are read
//! from its head; programs are converted by superchannels and chained by
//! teleportation. The crate also classifies programs against a three-level
//! resource hierarchy and implements covariant (blind) programming of
//! single-qudit unitaries.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, persistence
//! and the command-line front end live in the companion `qvn` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod circuit;
pub mod classify;
pub mod covariant;
pub mod error;
pub mod gates;
pub mod kernel;
pub mod memory;
pub mod superchannel;
pub mod teleport;

pub use error::{Error, Result};
pub use kernel::{DensityOperator, Matrix, PureState, Vector, C64, DEFAULT_TOL};
