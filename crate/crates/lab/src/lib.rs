//! Scenario files, their execution and reports.

pub use algebroid_core as core;

pub mod bundled;
pub mod cache;
pub mod checks;
pub mod oracle;
pub mod report;
pub mod run;
pub mod scenario;
pub mod witness;
