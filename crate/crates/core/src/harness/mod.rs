//! Batch driver: configuration, task pipelines, CSV tables and the summary file.

pub mod config;
pub mod report;
pub mod tasks;

pub use config::{Mode, RunConfig, Task};
pub use report::{Check, Summary, Table};
pub use tasks::run;
