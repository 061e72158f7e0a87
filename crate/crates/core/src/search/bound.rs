use crate::model::{time_sequence, Instance, ModelError};
use crate::time::Time;

/// Lower bound on the span of machine `k` when the jobs in `remaining` still
/// have to be appended after `last` (job and its completion time).
///
/// Combines two admissible terms: a load bound (earliest possible start,
/// plus all durations, plus each job's cheapest incoming setup) and the
/// largest single release + duration.
pub(crate) fn machine_lb<T: Time>(inst: &Instance<T>, k: usize, last: Option<(usize, T)>, remaining: &[usize]) -> T {
    machine_lb_with(inst, k, last, remaining, &[])
}

/// As [`machine_lb`], where the jobs in `extra` may also end up on `k` and
/// so may precede any remaining job.
fn machine_lb_with<T: Time>(
    inst: &Instance<T>,
    k: usize,
    last: Option<(usize, T)>,
    remaining: &[usize],
    extra: &[usize],
) -> T {
    let t0 = last.map_or(T::zero(), |(_, c)| c);
    if remaining.is_empty() {
        return t0;
    }
    let mut min_release = T::max_value();
    let mut sum_d = T::zero();
    let mut sum_setup = T::zero();
    let mut max_min_in = T::zero();
    let mut single = T::zero();
    for &j in remaining {
        let (r, d) = (inst.r(j, k), inst.d(j, k));
        min_release = min_release.min(r);
        sum_d = sum_d + d;
        let preds = remaining.iter().chain(extra).copied().filter(|&i| i != j).chain(last.map(|(l, _)| l));
        let min_in = preds.map(|i| inst.s(i, j, k)).min();
        let min_in = min_in.unwrap_or_else(T::zero);
        sum_setup = sum_setup + min_in;
        max_min_in = max_min_in.max(min_in);
        let lone = if last.is_some() { r + d + min_in } else { r + d };
        single = single.max(lone);
    }
    // Without a predecessor the first job pays no setup.
    if last.is_none() {
        sum_setup = sum_setup - max_min_in;
    }
    (t0.max(min_release) + sum_d + sum_setup).max(single)
}

/// A partially built schedule: some jobs are assigned, and each machine has
/// a fixed prefix of its sequence. Assigned jobs not in the prefix are
/// appended later in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSchedule {
    pub assignment: Vec<Option<usize>>,
    pub prefixes: Vec<Vec<usize>>,
}

impl PartialSchedule {
    pub fn empty(m: usize, n: usize) -> Self {
        PartialSchedule { assignment: vec![None; n], prefixes: vec![Vec::new(); m] }
    }

    pub fn validate<T: Time>(&self, inst: &Instance<T>) -> Result<(), ModelError> {
        let (m, n) = (inst.machine_count(), inst.job_count());
        if self.assignment.len() != n || self.prefixes.len() != m {
            return Err(ModelError::ShapeMismatch {
                expected: format!("{n} jobs / {m} machines"),
                found: format!("{} jobs / {} machines", self.assignment.len(), self.prefixes.len()),
            });
        }
        for (j, a) in self.assignment.iter().enumerate() {
            if let Some(k) = *a {
                if k >= m || !inst.is_eligible(j, k) {
                    return Err(ModelError::Ineligible { job: inst.job_name(j).to_string(), machine: format!("#{k}") });
                }
            }
        }
        let mut seen = vec![false; n];
        for (k, p) in self.prefixes.iter().enumerate() {
            for &j in p {
                if j >= n {
                    return Err(ModelError::UnknownJob(j));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(ModelError::DuplicateJob { job: inst.job_name(j).to_string() });
                }
                if self.assignment[j] != Some(k) {
                    return Err(ModelError::AssignmentMismatch {
                        job: inst.job_name(j).to_string(),
                        machine: inst.machine_name(k).to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Admissible bound on the makespan of every completion of `partial`:
/// the largest per-machine bound, and for every unassigned job the best
/// machine bound it could achieve after being added.
pub fn lower_bound<T: Time>(partial: &PartialSchedule, inst: &Instance<T>) -> Result<T, ModelError> {
    partial.validate(inst)?;
    let m = inst.machine_count();
    let mut lasts = Vec::with_capacity(m);
    let mut remaining: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, prefix) in partial.prefixes.iter().enumerate() {
        let mut last = None;
        time_sequence(inst, k, prefix, |j, _, _, c| last = Some((j, c)));
        lasts.push(last);
    }
    for (j, a) in partial.assignment.iter().enumerate() {
        if let Some(k) = *a {
            if !partial.prefixes[k].contains(&j) {
                remaining[k].push(j);
            }
        }
    }
    let open: Vec<Vec<usize>> = (0..m)
        .map(|k| inst.eligible_jobs(k).iter().copied().filter(|&j| partial.assignment[j].is_none()).collect())
        .collect();
    let mut lb =
        (0..m).map(|k| machine_lb_with(inst, k, lasts[k], &remaining[k], &open[k])).max().unwrap_or_else(T::zero);
    for (j, a) in partial.assignment.iter().enumerate() {
        if a.is_none() {
            let best = inst
                .cap(j)
                .iter()
                .map(|&k| {
                    let mut rem = remaining[k].clone();
                    rem.push(j);
                    machine_lb_with(inst, k, lasts[k], &rem, &open[k])
                })
                .min()
                .expect("non-empty cap");
            lb = lb.max(best);
        }
    }
    Ok(lb)
}
