//! Monte Carlo model of journal peer review and citation accumulation, used
//! to compare the journal impact factor against per-article citation counts
//! as indicators of article value. Also includes an exact calculator for the
//! two-journal discrete example.

pub mod config;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod metrics;
mod rank;
pub mod report;
pub mod scenario;
pub mod simulation;

pub use error::{Error, Result};
