//! Reliability analysis of multi-connectivity over parallel Rayleigh
//! block-fading links.
//!
//! The crate evaluates outage probability, throughput, SNR gains and the
//! diversity-multiplexing tradeoff for joint decoding (JD), selection
//! combining (SC), maximal-ratio combining (MRC) and single connectivity
//! (SCo), and turns per-base-station SNR traces into empirical CDFs.
//!
//! All quantities are linear inside the library; dB only appears in
//! [`link::db_to_linear`] / [`link::linear_to_db`] and in trace files.

pub mod combiner;
pub mod error;
pub mod field_trial;
pub mod gains;
pub mod link;
pub mod outage;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod throughput;

pub use combiner::Combiner;
pub use error::{Error, Result};
