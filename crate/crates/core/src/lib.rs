//! Input–output relations for quantum light in a lossless two-mirror cavity.

pub mod cavity;
pub mod cli;
pub mod gram;
pub mod linalg;
pub mod metric;
pub mod mirror;
pub mod photon_states;
pub mod single_mode;
