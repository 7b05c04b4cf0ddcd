//! Batch front end for the t-J workbench: parameter files, run modes and
//! table-shaped reports.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{Mode, ParamFile, Precision, RunConfig};
pub use pipeline::run;
