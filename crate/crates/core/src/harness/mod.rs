//! Tracking experiments: references, the closed loop for each controller
//! case, and MAE/RMSE metrics.

mod metrics;
mod reference;
mod scenario;

use thiserror::Error;

use crate::control::ControlError;

pub use metrics::{
    compare_cases, compute_metrics, control_variation, metrics_from_errors, CaseRow, Metrics, MetricsTable,
};
pub use reference::{reference_at, Reference, ReferenceKind};
pub use scenario::{run_scenario, run_scenario_cached, tick_count, CaseId, RunOptions, Scenario, Trace, TraceRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("run diverged at tick {tick}: {signal}")]
    Diverged { tick: usize, signal: String },
}

impl From<ControlError> for HarnessError {
    fn from(e: ControlError) -> Self {
        HarnessError::Invalid(e.to_string())
    }
}
