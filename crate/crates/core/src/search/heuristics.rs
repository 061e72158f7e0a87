//! Branching scores. Higher scores are tried first; assignment decisions
//! (priority 2) are all taken before sequencing decisions (priority 1).

use crate::model::Instance;
use crate::time::Time;

/// `maxDuration(job) - duration(job, machine)`: favours machines on which
/// the job runs fast relative to its slowest eligible machine.
///
/// # Panics
/// If `machine` is not eligible for `job`.
pub fn assignment_score<T: Time>(inst: &Instance<T>, job: usize, machine: usize) -> T {
    assert!(inst.is_eligible(job, machine), "machine not eligible for job");
    let max = inst.cap(job).iter().map(|&k| inst.d(job, k)).max().unwrap_or_else(T::zero);
    max - inst.d(job, machine)
}

/// `maxSetup(job, machine) - setup(pred, job, machine)`, where `maxSetup` is
/// the largest setup into `job` on `machine` over all possible predecessors.
///
/// # Panics
/// If `pred == job` or either job is not eligible on `machine`.
pub fn sequencing_score<T: Time>(inst: &Instance<T>, pred: usize, job: usize, machine: usize) -> T {
    assert!(
        pred != job && inst.is_eligible(pred, machine) && inst.is_eligible(job, machine),
        "both jobs must be distinct and eligible"
    );
    max_setup_into(inst, job, machine) - inst.s(pred, job, machine)
}

fn max_setup_into<T: Time>(inst: &Instance<T>, job: usize, machine: usize) -> T {
    inst.eligible_jobs(machine)
        .iter()
        .filter(|&&i| i != job)
        .map(|&i| inst.s(i, job, machine))
        .max()
        .unwrap_or_else(T::zero)
}

/// Precomputed branching orders used by the search engine.
#[derive(Debug, Clone)]
pub(crate) struct BranchOrder<T> {
    /// Job order for the assignment phase.
    pub jobs: Vec<usize>,
    /// Per job, eligible machines in trial order.
    pub machines: Vec<Vec<usize>>,
    /// `[machine][job]` max incoming setup, present only with heuristics on.
    max_setup: Option<Vec<Vec<T>>>,
}

impl<T: Time> BranchOrder<T> {
    /// With heuristics off, jobs and machines are tried by ascending id.
    /// With heuristics on, the job owning the highest-scoring assignment is
    /// branched first and its machines are tried by descending score; ties
    /// go to the lowest job id, then the lowest machine id.
    pub fn new(inst: &Instance<T>, heuristics: bool) -> Self {
        let n = inst.job_count();
        let m = inst.machine_count();
        if !heuristics {
            return BranchOrder {
                jobs: (0..n).collect(),
                machines: (0..n).map(|j| inst.cap(j).to_vec()).collect(),
                max_setup: None,
            };
        }
        let machines: Vec<Vec<usize>> = (0..n)
            .map(|j| {
                let mut ks = inst.cap(j).to_vec();
                ks.sort_by_key(|&k| (std::cmp::Reverse(assignment_score(inst, j, k)), k));
                ks
            })
            .collect();
        let mut jobs: Vec<usize> = (0..n).collect();
        jobs.sort_by_key(|&j| (std::cmp::Reverse(assignment_score(inst, j, machines[j][0])), j));
        let max_setup = (0..m).map(|k| (0..n).map(|j| max_setup_into(inst, j, k)).collect()).collect();
        BranchOrder { jobs, machines, max_setup: Some(max_setup) }
    }

    /// Sorts candidate successors of `last` on machine `k`.
    pub fn order_successors(&self, inst: &Instance<T>, k: usize, last: Option<usize>, cands: &mut [usize]) {
        match (&self.max_setup, last) {
            (Some(ms), Some(l)) => {
                cands.sort_by_key(|&c| (std::cmp::Reverse(ms[k][c] - inst.s(l, c, k)), c));
            }
            _ => cands.sort_unstable(),
        }
    }
}
