//! Urine test-strip screening pipeline.

pub mod cli;
pub mod color;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod learners;
pub mod metrics;
pub mod plot;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
