//! Problem data, schedules, timing, and the lexicographic makespan objective.

mod instance;
mod lex;
mod schedule;

pub use instance::{Instance, InstanceBuilder};
pub use lex::{compare_lex, completion_count, dominates_by_completion, lex_makespan, LexMakespan, MachineSpans};
pub use schedule::{evaluate, Evaluation, Schedule};

pub(crate) use schedule::time_sequence;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance has no machines")]
    NoMachines,
    #[error("job {job} has no eligible machine")]
    NoEligibleMachine { job: String },
    #[error("job {job} has zero duration on {machine}")]
    ZeroDuration { job: String, machine: String },
    #[error("setup {from}->{to} on {machine} requires two distinct eligible jobs")]
    IneligibleSetup { from: String, to: String, machine: String },
    #[error("conflicting values for {what}")]
    Conflict { what: String },
    #[error("horizon {given} is below the required {required}")]
    HorizonTooSmall { given: String, required: String },
    #[error("time value overflows the time type")]
    Overflow,
    #[error("unknown job index {0}")]
    UnknownJob(usize),
    #[error("unknown machine index {0}")]
    UnknownMachine(usize),
    #[error("job {job} appears more than once")]
    DuplicateJob { job: String },
    #[error("job {job} is not scheduled")]
    MissingJob { job: String },
    #[error("job {job} is not eligible on {machine}")]
    Ineligible { job: String, machine: String },
    #[error("job {job} is sequenced on {machine} but assigned elsewhere")]
    AssignmentMismatch { job: String, machine: String },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("level {level} out of range 1..={machines}")]
    LevelOutOfRange { level: usize, machines: usize },
}
