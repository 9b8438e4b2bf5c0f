//! Evaluation harness: random instances, reports and verification.

pub mod generate;
pub mod report;
pub mod verify;

pub use generate::{gen_er, place_monitors, ErGraph, DEFAULT_MAX_RETRIES};
pub use report::{AnalysisReport, CcdfColumn, CcdfTableOf, Provenance, ReportRow, SetRow};
pub use verify::{run_batch, verify_topology, BatchSpec, Fault, InstanceReport, VerifyReport, Violation};
