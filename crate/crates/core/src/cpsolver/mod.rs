//! Exact solver: the interval model, its propagation, and a depth-first
//! branch-and-bound that can be warm-started from any valid schedule.

mod model;
mod propagate;
mod search;
mod warm;

use thiserror::Error;

pub use model::{
    assignment_from_schedule, build_model, check, schedule_from_assignment, Assignment, Constraint, Model,
    ModelViolation, OptionalIntervalVar, Presence, Resource, ResourceScope, VarId, VarKind,
};
pub use propagate::{propagate, Propagation};
pub use search::{search, search_with, SearchConfig, SearchOutcome, SearchStatus};
pub use warm::warm_start;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpError {
    #[error("schedule does not map onto the model: {0}")]
    Unmapped(String),
    #[error("schedule violates the model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<ModelViolation>),
    #[error("solver produced an inconsistent schedule: {0}")]
    Internal(String),
}
