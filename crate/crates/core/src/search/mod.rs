//! Complete search for schedules meeting level bounds, and makespan
//! minimization by branch-and-bound with incumbent pruning.

mod bound;
mod engine;
mod heuristics;
mod jobset;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::{Evaluation, Instance, ModelError, Schedule};
use crate::time::Time;

pub use bound::{lower_bound, PartialSchedule};
pub use heuristics::{assignment_score, sequencing_score};

/// "The `level`-th largest span is at most (strictly below) `bound`",
/// i.e. at least `m - level + 1` machines complete by `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBound<T> {
    pub level: usize,
    pub bound: T,
    pub strict: bool,
}

impl<T: Time> LevelBound<T> {
    pub fn at_most(level: usize, bound: T) -> Self {
        LevelBound { level, bound, strict: false }
    }

    pub fn below(level: usize, bound: T) -> Self {
        LevelBound { level, bound, strict: true }
    }

    /// Whether a single machine span counts towards this bound.
    pub fn admits(&self, span: T) -> bool {
        if self.strict {
            span < self.bound
        } else {
            span <= self.bound
        }
    }

    /// Whether a full vector of machine spans satisfies this bound.
    pub fn holds(&self, spans: &[T]) -> bool {
        spans.iter().filter(|&&s| self.admits(s)).count() + self.level > spans.len()
    }
}

/// Resource limits of one search call. `Default` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchBudget {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl SearchBudget {
    pub fn unbounded() -> Self {
        SearchBudget::default()
    }

    pub fn time(limit: Duration) -> Self {
        SearchBudget { time_limit: Some(limit), node_limit: None }
    }

    pub fn nodes(limit: u64) -> Self {
        SearchBudget { time_limit: None, node_limit: Some(limit) }
    }

    pub fn with_nodes(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn is_unbounded(&self) -> bool {
        self.time_limit.is_none() && self.node_limit.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    ExhaustedInfeasible,
    BudgetExceeded,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub status: SearchStatus,
    pub schedule: Option<Schedule>,
    pub evaluation: Option<Evaluation<T>>,
    /// The whole search space was explored (or the incumbent matched a
    /// global lower bound). For minimization this proves optimality.
    pub complete: bool,
    pub nodes: u64,
    /// Node count at which the first solution was found.
    pub first_solution_node: Option<u64>,
}

impl<T> SearchOutcome<T> {
    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

fn check_bounds<T: Time>(inst: &Instance<T>, bounds: &[LevelBound<T>]) -> Result<(), ModelError> {
    let m = inst.machine_count();
    match bounds.iter().find(|b| b.level == 0 || b.level > m) {
        Some(b) => Err(ModelError::LevelOutOfRange { level: b.level, machines: m }),
        None => Ok(()),
    }
}

/// Finds a schedule satisfying every level bound, or proves none exists.
pub fn find_schedule<T: Time>(
    inst: &Instance<T>,
    bounds: &[LevelBound<T>],
    heuristics: bool,
    budget: &SearchBudget,
) -> Result<SearchOutcome<T>, ModelError> {
    check_bounds(inst, bounds)?;
    let report = engine::Engine::new(inst, bounds.to_vec(), heuristics, false, budget, |_, _, _| {}).run();
    let (schedule, evaluation) = report.best.unzip();
    let status = if schedule.is_some() {
        SearchStatus::Found
    } else if report.aborted {
        SearchStatus::BudgetExceeded
    } else {
        SearchStatus::ExhaustedInfeasible
    };
    Ok(SearchOutcome {
        status,
        schedule,
        evaluation,
        complete: !report.aborted && status == SearchStatus::ExhaustedInfeasible,
        nodes: report.nodes,
        first_solution_node: report.first_solution_node,
    })
}

/// Minimizes the makespan within `budget`, keeping the best schedule found.
pub fn minimize_makespan<T: Time>(inst: &Instance<T>, heuristics: bool, budget: &SearchBudget) -> SearchOutcome<T> {
    minimize_makespan_with(inst, heuristics, budget, |_, _, _| {})
}

/// As [`minimize_makespan`], calling `on_incumbent(schedule, evaluation,
/// nodes)` each time a strictly better schedule is found.
pub fn minimize_makespan_with<T: Time>(
    inst: &Instance<T>,
    heuristics: bool,
    budget: &SearchBudget,
    on_incumbent: impl FnMut(&Schedule, &Evaluation<T>, u64),
) -> SearchOutcome<T> {
    let report = engine::Engine::new(inst, Vec::new(), heuristics, true, budget, on_incumbent).run();
    let (schedule, evaluation) = report.best.unzip();
    let status = match (&schedule, report.aborted) {
        (Some(_), _) => SearchStatus::Found,
        (None, true) => SearchStatus::BudgetExceeded,
        (None, false) => SearchStatus::ExhaustedInfeasible,
    };
    SearchOutcome {
        status,
        schedule,
        evaluation,
        complete: !report.aborted,
        nodes: report.nodes,
        first_solution_node: report.first_solution_node,
    }
}
