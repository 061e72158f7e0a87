//! Lexicographic makespan optimization for unrelated parallel machine
//! scheduling with machine eligibility, machine-dependent release dates and
//! durations, and sequence-dependent setup times.
//!
//! The core types are generic over an unsigned integer [`Time`]; the
//! aliases below fix it to `u64` (or `u32`) for everyday use.

pub mod bench;
pub mod instgen;
pub mod io;
pub mod lexopt;
pub mod model;
pub mod oracle;
pub mod search;
mod time;

pub use time::Time;

pub use model::{Evaluation, Instance, InstanceBuilder, LexMakespan, ModelError, Schedule};

pub type Instance64 = model::Instance<u64>;
pub type InstanceBuilder64 = model::InstanceBuilder<u64>;
pub type Evaluation64 = model::Evaluation<u64>;
pub type LexMakespan64 = model::LexMakespan<u64>;
pub type LevelBound64 = search::LevelBound<u64>;
pub type SearchOutcome64 = search::SearchOutcome<u64>;
pub type LexOptResult64 = lexopt::LexOptResult<u64>;

pub type Instance32 = model::Instance<u32>;
pub type Evaluation32 = model::Evaluation<u32>;
pub type LexMakespan32 = model::LexMakespan<u32>;
