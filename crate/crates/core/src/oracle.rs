//! Exhaustive enumeration of every schedule of a small instance.
//!
//! Timing is recomputed here by a separate, deliberately naive routine in
//! 128-bit arithmetic so that the oracle does not share code with
//! [`crate::model::evaluate`].

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::{Evaluation, Instance, LexMakespan, Schedule};
use crate::time::Time;

/// Default refusal threshold on `Π_j |cap(j)| · n!`.
pub const DEFAULT_LEAF_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: worst case {size} leaves exceeds cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("level {level} out of range 1..={machines}")]
    LevelOutOfRange { level: usize, machines: usize },
}

#[derive(Debug, Clone)]
pub struct OracleResult<T> {
    pub best_schedule: Schedule,
    pub best_lex: LexMakespan<T>,
    pub schedule_count: u64,
}

/// Worst-case leaf count `Π_j |cap(j)| · n!` (saturating).
pub fn enumeration_size<T: Time>(inst: &Instance<T>) -> u128 {
    let assignments = (0..inst.job_count()).fold(1u128, |acc, j| acc.saturating_mul(inst.cap(j).len() as u128));
    let perms = (1..=inst.job_count() as u128).fold(1u128, |acc, i| acc.saturating_mul(i));
    assignments.saturating_mul(perms)
}

/// Exact number of schedules: Σ over assignments of Π over machines of
/// (jobs on machine)!. Computed by enumerating assignments only.
pub fn count_schedules<T: Time>(inst: &Instance<T>) -> u128 {
    fn rec<T: Time>(inst: &Instance<T>, j: usize, loads: &mut Vec<u128>) -> u128 {
        if j == inst.job_count() {
            return loads.iter().map(|&q| (1..=q).product::<u128>()).product();
        }
        let mut total = 0;
        for &k in inst.cap(j) {
            loads[k] += 1;
            total += rec(inst, j + 1, loads);
            loads[k] -= 1;
        }
        total
    }
    rec(inst, 0, &mut vec![0; inst.machine_count()])
}

/// Naive timing: start, processing and completion per job, in u128.
fn naive_times<T: Time>(inst: &Instance<T>, sequences: &[Vec<usize>]) -> Evaluation<T> {
    let n = inst.job_count();
    let mut start = vec![0u128; n];
    let mut processing = vec![0u128; n];
    let mut completion = vec![0u128; n];
    let mut span = vec![0u128; sequences.len()];
    for (k, seq) in sequences.iter().enumerate() {
        for (pos, &j) in seq.iter().enumerate() {
            let release = inst.release(j, k).unwrap().as_u128();
            let dur = inst.duration(j, k).unwrap().as_u128();
            if pos == 0 {
                start[j] = release;
                processing[j] = dur;
            } else {
                let prev = seq[pos - 1];
                start[j] = if completion[prev] > release { completion[prev] } else { release };
                processing[j] = inst.setup(prev, j, k).unwrap().as_u128() + dur;
            }
            completion[j] = start[j] + processing[j];
        }
        if let Some(&last) = seq.last() {
            span[k] = completion[last];
        }
    }
    let conv = |v: Vec<u128>| -> Vec<T> { v.into_iter().map(|x| T::from_u128(x).expect("fits time type")).collect() };
    let makespan = T::from_u128(span.iter().copied().max().unwrap_or(0)).expect("fits time type");
    Evaluation {
        start: conv(start),
        processing: conv(processing),
        completion: conv(completion),
        span: conv(span),
        makespan,
    }
}

/// Calls `visit` once for every valid schedule: all eligible assignments
/// times all per-machine orderings. Refuses instances whose worst-case size
/// exceeds `cap`.
pub fn enumerate_schedules<T: Time>(
    inst: &Instance<T>,
    cap: u128,
    mut visit: impl FnMut(&Schedule, &Evaluation<T>),
) -> Result<u64, OracleError> {
    let size = enumeration_size(inst);
    if size > cap {
        return Err(OracleError::TooLarge { size, cap });
    }
    let m = inst.machine_count();
    let n = inst.job_count();
    let mut assignment = vec![0usize; n];
    let mut count = 0u64;
    assign_rec(inst, 0, &mut assignment, &mut |assignment| {
        let groups: Vec<Vec<usize>> = (0..m).map(|k| (0..n).filter(|&j| assignment[j] == k).collect()).collect();
        let mut current: Vec<Vec<usize>> = vec![Vec::new(); m];
        permute_machines(&groups, 0, &mut current, &mut |seqs| {
            let schedule = Schedule::from_parts(assignment.to_vec(), seqs.to_vec());
            let eval = naive_times(inst, seqs);
            count += 1;
            visit(&schedule, &eval);
        });
    });
    Ok(count)
}

fn assign_rec<T: Time>(inst: &Instance<T>, j: usize, assignment: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if j == inst.job_count() {
        f(assignment);
        return;
    }
    for &k in inst.cap(j) {
        assignment[j] = k;
        assign_rec(inst, j + 1, assignment, f);
    }
}

fn permute_machines(groups: &[Vec<usize>], k: usize, current: &mut Vec<Vec<usize>>, f: &mut dyn FnMut(&[Vec<usize>])) {
    if k == groups.len() {
        f(current);
        return;
    }
    let mut used = vec![false; groups[k].len()];
    permute_one(groups, k, &mut used, current, f);
}

fn permute_one(
    groups: &[Vec<usize>],
    k: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<Vec<usize>>,
    f: &mut dyn FnMut(&[Vec<usize>]),
) {
    if current[k].len() == groups[k].len() {
        permute_machines(groups, k + 1, current, f);
        return;
    }
    for i in 0..groups[k].len() {
        if !used[i] {
            used[i] = true;
            current[k].push(groups[k][i]);
            permute_one(groups, k, used, current, f);
            current[k].pop();
            used[i] = false;
        }
    }
}

/// Lex-optimal schedule over the first `l` components. Among equal
/// candidates the full tuple decides, then the smallest schedule encoding.
pub fn oracle_lex_optimum<T: Time>(inst: &Instance<T>, l: usize) -> Result<OracleResult<T>, OracleError> {
    oracle_lex_optimum_capped(inst, l, DEFAULT_LEAF_CAP)
}

pub fn oracle_lex_optimum_capped<T: Time>(
    inst: &Instance<T>,
    l: usize,
    cap: u128,
) -> Result<OracleResult<T>, OracleError> {
    let m = inst.machine_count();
    if l == 0 || l > m {
        return Err(OracleError::LevelOutOfRange { level: l, machines: m });
    }
    let mut best: Option<(Schedule, LexMakespan<T>)> = None;
    let count = enumerate_schedules(inst, cap, |s, e| {
        let lex = LexMakespan::from_spans(&e.span);
        let better = match &best {
            None => true,
            Some((bs, bl)) => {
                let head = lex.as_slice()[..l].cmp(&bl.as_slice()[..l]);
                head.then_with(|| lex.as_slice().cmp(bl.as_slice())).then_with(|| s.cmp(bs)) == Ordering::Less
            }
        };
        if better {
            best = Some((s.clone(), lex));
        }
    })?;
    let (best_schedule, best_lex) = best.expect("at least one schedule exists");
    Ok(OracleResult { best_schedule, best_lex, schedule_count: count })
}

/// All schedules with their evaluations, collected.
pub fn all_schedules<T: Time>(inst: &Instance<T>) -> Result<Vec<(Schedule, Evaluation<T>)>, OracleError> {
    let mut out = Vec::new();
    enumerate_schedules(inst, DEFAULT_LEAF_CAP, |s, e| out.push((s.clone(), e.clone())))?;
    Ok(out)
}
