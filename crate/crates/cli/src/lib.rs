//! Sweeps, figure presets, trace CDFs and self-checks behind the
//! `multiconn` command.

pub mod app;
pub mod cdf;
pub mod error;
pub mod grid;
pub mod preset;
pub mod selftest;
pub mod sweep;
pub mod table;

pub use error::{CliError, Result};
