//! Lexicographic makespan optimization: exact hierarchical descent and the
//! machine-fixing approximation, with per-level budget policies and
//! granularity-coarsened descent bounds.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{evaluate, lex_makespan, Evaluation, Instance, LexMakespan, Schedule};
use crate::search::{find_schedule, minimize_makespan, LevelBound, SearchBudget, SearchStatus};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetPolicy {
    Uniform,
    /// Level i receives (1/2)^i of the total; the last level takes the rest.
    GeometricHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelStatus {
    ProvedOptimal,
    BudgetCut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexOptConfig<T> {
    /// Number of lex components to optimize, `1..=m`.
    pub l: usize,
    pub total_budget: SearchBudget,
    pub budget_policy: BudgetPolicy,
    /// Spacing of the descent grid; 1 is exact.
    pub granularity: T,
    pub heuristics: bool,
}

impl<T: Time> LexOptConfig<T> {
    /// Exact, unbounded, heuristics on.
    pub fn exact(l: usize) -> Self {
        LexOptConfig {
            l,
            total_budget: SearchBudget::unbounded(),
            budget_policy: BudgetPolicy::GeometricHalf,
            granularity: T::one(),
            heuristics: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LexOptResult<T> {
    pub schedule: Schedule,
    pub evaluation: Evaluation<T>,
    pub lex: LexMakespan<T>,
    pub per_level_status: Vec<LevelStatus>,
    /// Number of `find_schedule` / `minimize_makespan` calls issued.
    pub solver_calls: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexOptError {
    #[error("no schedule found within the budget")]
    NoSolution,
    #[error("l = {l} out of range 1..={machines}")]
    LevelOutOfRange { l: usize, machines: usize },
    #[error("granularity must be at least 1")]
    ZeroGranularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coarsen {
    /// Largest multiple of g strictly below b (0 if none).
    DownStrict,
    /// Smallest multiple of g at or above b.
    Up,
}

pub fn coarsen_bound<T: Time>(b: T, g: T, direction: Coarsen) -> T {
    assert!(g >= T::one(), "granularity must be positive");
    match direction {
        Coarsen::DownStrict if b == T::zero() => T::zero(),
        Coarsen::DownStrict => (b - T::one()) / g * g,
        Coarsen::Up => {
            let r = b % g;
            if r == T::zero() {
                b
            } else {
                b + (g - r)
            }
        }
    }
}

/// Splits a total budget over `l` levels. Time and node limits are split
/// independently; unbounded components stay unbounded.
pub fn split_budget(total: &SearchBudget, l: usize, policy: BudgetPolicy) -> Vec<SearchBudget> {
    assert!(l >= 1, "at least one level");
    let times = total.time_limit.map(|t| split_duration(t, l, policy));
    let nodes = total.node_limit.map(|n| split_nodes(n, l, policy));
    (0..l)
        .map(|i| SearchBudget { time_limit: times.as_ref().map(|v| v[i]), node_limit: nodes.as_ref().map(|v| v[i]) })
        .collect()
}

fn split_duration(total: Duration, l: usize, policy: BudgetPolicy) -> Vec<Duration> {
    let mut parts: Vec<Duration> = match policy {
        BudgetPolicy::Uniform => vec![total / l as u32; l - 1],
        BudgetPolicy::GeometricHalf => (1..l).map(|i| total / 2u32.saturating_pow(i as u32)).collect(),
    };
    let used: Duration = parts.iter().sum();
    parts.push(total.saturating_sub(used));
    parts
}

fn split_nodes(total: u64, l: usize, policy: BudgetPolicy) -> Vec<u64> {
    let mut parts: Vec<u64> = match policy {
        BudgetPolicy::Uniform => vec![total / l as u64; l - 1],
        BudgetPolicy::GeometricHalf => (1..l).map(|i| total.checked_shr(i as u32).unwrap_or(0)).collect(),
    };
    let used: u64 = parts.iter().sum();
    parts.push(total - used);
    parts
}

/// Budget of one level, including anything rolled over from earlier levels.
struct LevelClock {
    budget: SearchBudget,
    started: Instant,
    nodes_used: u64,
}

impl LevelClock {
    fn new(budget: SearchBudget) -> Self {
        LevelClock { budget, started: Instant::now(), nodes_used: 0 }
    }

    fn remaining(&self) -> SearchBudget {
        SearchBudget {
            time_limit: self.budget.time_limit.map(|t| t.saturating_sub(self.started.elapsed())),
            node_limit: self.budget.node_limit.map(|n| n.saturating_sub(self.nodes_used)),
        }
    }

    fn spent(&self) -> bool {
        let r = self.remaining();
        r.time_limit.is_some_and(|t| t.is_zero()) || r.node_limit == Some(0)
    }

    fn charge(&mut self, nodes: u64) {
        self.nodes_used += nodes;
    }
}

fn add_budget(a: SearchBudget, b: SearchBudget) -> SearchBudget {
    SearchBudget {
        time_limit: a.time_limit.map(|t| t + b.time_limit.unwrap_or_default()),
        node_limit: a.node_limit.map(|n| n + b.node_limit.unwrap_or_default()),
    }
}

fn validate<T: Time>(inst: &Instance<T>, config: &LexOptConfig<T>) -> Result<(), LexOptError> {
    let m = inst.machine_count();
    if config.l == 0 || config.l > m {
        return Err(LexOptError::LevelOutOfRange { l: config.l, machines: m });
    }
    if config.granularity == T::zero() {
        return Err(LexOptError::ZeroGranularity);
    }
    Ok(())
}

/// Hierarchical descent, highest level first.
///
/// After an initial solution, level `i` is lowered by re-solving with "the
/// i-th largest span is below c_i" until that is infeasible or the level
/// budget runs out; then "at most c_i" is frozen and level `i + 1` starts.
/// With granularity `g > 1` the descent asks for the next lower multiple of
/// `g` and the frozen bound is rounded up to a multiple of `g`.
pub fn optimize_lex_exact<T: Time>(
    inst: &Instance<T>,
    config: &LexOptConfig<T>,
) -> Result<LexOptResult<T>, LexOptError> {
    validate(inst, config)?;
    let g = config.granularity;
    let budgets = split_budget(&config.total_budget, config.l, config.budget_policy);
    let mut frozen: Vec<LevelBound<T>> = Vec::new();
    let mut statuses = Vec::with_capacity(config.l);
    let mut calls = 0;
    let mut nodes = 0;
    let mut carry = SearchBudget { time_limit: Some(Duration::ZERO), node_limit: Some(0) };
    let mut current: Option<(Schedule, Evaluation<T>)> = None;

    for i in 1..=config.l {
        let mut clock = LevelClock::new(add_budget(budgets[i - 1], carry));
        if current.is_none() {
            let out = find_schedule(inst, &frozen, config.heuristics, &clock.remaining()).expect("levels validated");
            calls += 1;
            nodes += out.nodes;
            clock.charge(out.nodes);
            match (out.schedule, out.evaluation) {
                (Some(s), Some(e)) => current = Some((s, e)),
                _ => return Err(LexOptError::NoSolution),
            }
        }
        let mut status = LevelStatus::BudgetCut;
        loop {
            let (_, eval) = current.as_ref().expect("solution present");
            let c_i = lex_makespan(eval).level(i);
            if c_i == T::zero() {
                status = LevelStatus::ProvedOptimal;
                break;
            }
            if clock.spent() {
                break;
            }
            let descend = if g == T::one() {
                LevelBound::below(i, c_i)
            } else {
                LevelBound::at_most(i, coarsen_bound(c_i, g, Coarsen::DownStrict))
            };
            let mut bounds = frozen.clone();
            bounds.push(descend);
            let out = find_schedule(inst, &bounds, config.heuristics, &clock.remaining()).expect("levels validated");
            calls += 1;
            nodes += out.nodes;
            clock.charge(out.nodes);
            match out.status {
                SearchStatus::Found => current = Some((out.schedule.unwrap(), out.evaluation.unwrap())),
                SearchStatus::ExhaustedInfeasible => {
                    status = LevelStatus::ProvedOptimal;
                    break;
                }
                SearchStatus::BudgetExceeded => break,
            }
        }
        let (_, eval) = current.as_ref().expect("solution present");
        let c_i = lex_makespan(eval).level(i);
        frozen.push(LevelBound::at_most(i, coarsen_bound(c_i, g, Coarsen::Up)));
        statuses.push(status);
        carry = clock.remaining();
    }

    let (schedule, evaluation) = current.expect("solution present");
    let lex = lex_makespan(&evaluation);
    Ok(LexOptResult { schedule, evaluation, lex, per_level_status: statuses, solver_calls: calls, nodes })
}

/// Machine-fixing approximation: minimize the makespan, freeze the
/// lowest-id machine attaining it together with its jobs, and repeat on the
/// residual instance for `l` levels (or until nothing is left).
pub fn approximate_lex<T: Time>(inst: &Instance<T>, config: &LexOptConfig<T>) -> Result<LexOptResult<T>, LexOptError> {
    validate(inst, config)?;
    let m = inst.machine_count();
    let budgets = split_budget(&config.total_budget, config.l, config.budget_policy);
    let mut machines_left: Vec<usize> = (0..m).collect();
    let mut jobs_left: Vec<usize> = (0..inst.job_count()).collect();
    let mut fixed: Vec<Option<Vec<usize>>> = vec![None; m];
    // Sequences of the latest residual solution, in original ids.
    let mut latest: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut statuses = Vec::with_capacity(config.l);
    let mut calls = 0;
    let mut nodes = 0;
    let mut carry = SearchBudget { time_limit: Some(Duration::ZERO), node_limit: Some(0) };

    for i in 1..=config.l {
        if machines_left.is_empty() || jobs_left.is_empty() {
            statuses.push(LevelStatus::ProvedOptimal);
            continue;
        }
        let mut clock = LevelClock::new(add_budget(budgets[i - 1], carry));
        let residual = inst.restrict(&machines_left, &jobs_left).expect("residual jobs keep their machines");
        let out = minimize_makespan(&residual, config.heuristics, &clock.remaining());
        calls += 1;
        nodes += out.nodes;
        clock.charge(out.nodes);
        let Some(schedule) = out.schedule else {
            if i == 1 {
                return Err(LexOptError::NoSolution);
            }
            statuses.extend(std::iter::repeat_n(LevelStatus::BudgetCut, config.l + 1 - i));
            break;
        };
        let eval = out.evaluation.expect("found");
        for (rk, seq) in schedule.sequences().iter().enumerate() {
            latest[machines_left[rk]] = seq.iter().map(|&rj| jobs_left[rj]).collect();
        }
        statuses.push(if out.complete { LevelStatus::ProvedOptimal } else { LevelStatus::BudgetCut });
        let rk = eval.span.iter().position(|&s| s == eval.makespan).expect("makespan attained");
        let k = machines_left[rk];
        fixed[k] = Some(latest[k].clone());
        machines_left.remove(rk);
        jobs_left.retain(|j| !latest[k].contains(j));
        carry = clock.remaining();
    }

    let sequences: Vec<Vec<usize>> = (0..m).map(|k| fixed[k].clone().unwrap_or_else(|| latest[k].clone())).collect();
    let schedule = Schedule::from_sequences(inst.job_count(), sequences).expect("union of residual solutions");
    let evaluation = evaluate(&schedule, inst).expect("union of residual solutions is feasible");
    let lex = lex_makespan(&evaluation);
    Ok(LexOptResult { schedule, evaluation, lex, per_level_status: statuses, solver_calls: calls, nodes })
}
