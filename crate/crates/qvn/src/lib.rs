//! File formats, persistent program registry, circuit files and the
//! `qvn` command-line front end for [`qvn_core`].

pub mod circuit_file;
pub mod cli;
pub mod error;
pub mod format;
pub mod registry;

pub use error::{QvnError, Result};
