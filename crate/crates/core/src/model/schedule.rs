use serde::{Deserialize, Serialize};

use crate::model::{Instance, ModelError};
use crate::time::Time;

/// Job-to-machine assignment plus a processing sequence per machine.
///
/// Ordering is lexicographic on `(assignment, sequences)` and is used for
/// deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Schedule {
    assignment: Vec<usize>,
    sequences: Vec<Vec<usize>>,
}

impl Schedule {
    /// Builds a schedule from per-machine sequences over `n` jobs, deriving
    /// the assignment. Rejects duplicated, out-of-range and missing jobs.
    pub fn from_sequences(n: usize, sequences: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let mut assignment = vec![usize::MAX; n];
        for (k, seq) in sequences.iter().enumerate() {
            for &j in seq {
                if j >= n {
                    return Err(ModelError::UnknownJob(j));
                }
                if assignment[j] != usize::MAX {
                    return Err(ModelError::DuplicateJob { job: format!("#{j}") });
                }
                assignment[j] = k;
            }
        }
        if let Some(j) = assignment.iter().position(|&k| k == usize::MAX) {
            return Err(ModelError::MissingJob { job: format!("#{j}") });
        }
        Ok(Schedule { assignment, sequences })
    }

    /// Unvalidated constructor; [`Schedule::validate`] and [`evaluate`] check it.
    pub fn from_parts(assignment: Vec<usize>, sequences: Vec<Vec<usize>>) -> Self {
        Schedule { assignment, sequences }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn sequence(&self, k: usize) -> &[usize] {
        &self.sequences[k]
    }

    pub fn into_sequences(self) -> Vec<Vec<usize>> {
        self.sequences
    }

    /// Checks the schedule invariants against `inst`: every job appears
    /// exactly once, on its assigned and eligible machine.
    pub fn validate<T: Time>(&self, inst: &Instance<T>) -> Result<(), ModelError> {
        let n = inst.job_count();
        let m = inst.machine_count();
        if self.assignment.len() != n || self.sequences.len() != m {
            return Err(ModelError::ShapeMismatch {
                expected: format!("{n} jobs / {m} machines"),
                found: format!("{} jobs / {} machines", self.assignment.len(), self.sequences.len()),
            });
        }
        let mut seen = vec![false; n];
        for (k, seq) in self.sequences.iter().enumerate() {
            for &j in seq {
                if j >= n {
                    return Err(ModelError::UnknownJob(j));
                }
                if seen[j] {
                    return Err(ModelError::DuplicateJob { job: inst.job_name(j).to_string() });
                }
                seen[j] = true;
                if self.assignment[j] != k {
                    return Err(ModelError::AssignmentMismatch {
                        job: inst.job_name(j).to_string(),
                        machine: inst.machine_name(k).to_string(),
                    });
                }
                if !inst.is_eligible(j, k) {
                    return Err(ModelError::Ineligible {
                        job: inst.job_name(j).to_string(),
                        machine: inst.machine_name(k).to_string(),
                    });
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(ModelError::MissingJob { job: inst.job_name(j).to_string() });
        }
        Ok(())
    }
}

/// Timing of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation<T> {
    pub start: Vec<T>,
    pub processing: Vec<T>,
    pub completion: Vec<T>,
    pub span: Vec<T>,
    pub makespan: T,
}

/// Forward timing of one machine's sequence. Returns the completion of
/// the last job (0 for an empty sequence).
pub(crate) fn time_sequence<T: Time>(
    inst: &Instance<T>,
    k: usize,
    seq: &[usize],
    mut visit: impl FnMut(usize, T, T, T),
) -> T {
    let mut prev: Option<(usize, T)> = None;
    for &j in seq {
        let (start, processing) = match prev {
            None => (inst.r(j, k), inst.d(j, k)),
            Some((i, c)) => (inst.r(j, k).max(c), inst.s(i, j, k) + inst.d(j, k)),
        };
        let completion = start + processing;
        visit(j, start, processing, completion);
        prev = Some((j, completion));
    }
    prev.map_or(T::zero(), |(_, c)| c)
}

/// Computes start, processing and completion times of every job and the
/// machine spans. The first job on a machine starts at its release date;
/// each later job starts at the later of its release date and its
/// predecessor's completion, and its processing includes the setup from
/// that predecessor.
pub fn evaluate<T: Time>(schedule: &Schedule, inst: &Instance<T>) -> Result<Evaluation<T>, ModelError> {
    schedule.validate(inst)?;
    let n = inst.job_count();
    let mut start = vec![T::zero(); n];
    let mut processing = vec![T::zero(); n];
    let mut completion = vec![T::zero(); n];
    let span: Vec<T> = schedule
        .sequences
        .iter()
        .enumerate()
        .map(|(k, seq)| {
            time_sequence(inst, k, seq, |j, st, p, c| {
                start[j] = st;
                processing[j] = p;
                completion[j] = c;
            })
        })
        .collect();
    let makespan = span.iter().copied().max().unwrap_or_else(T::zero);
    Ok(Evaluation { start, processing, completion, span, makespan })
}
