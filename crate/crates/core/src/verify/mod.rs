//! Inequality checkers, the counterexample search and the case registry.

pub mod checks;
pub mod remark;
pub mod registry;
pub mod report;

pub use report::{InequalityCheckReport, InstanceDigest, Margin, ReportBuilder};
