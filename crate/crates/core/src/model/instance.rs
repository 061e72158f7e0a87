use crate::model::ModelError;
use crate::time::Time;

/// A scheduling problem: machines, jobs, eligibility, machine-dependent
/// release dates and durations, and sequence-dependent setup times.
///
/// Machines and jobs are addressed by dense indices (`0..machine_count()`,
/// `0..job_count()`); their textual names are kept for IO and reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<T> {
    machines: Vec<String>,
    jobs: Vec<String>,
    /// Per job, sorted eligible machines.
    cap: Vec<Vec<usize>>,
    /// Per machine, sorted eligible jobs.
    machine_jobs: Vec<Vec<usize>>,
    /// `[job * m + machine]`
    eligible: Vec<bool>,
    duration: Vec<T>,
    release: Vec<T>,
    /// `[(machine * n + from) * n + to]`
    setup: Vec<T>,
    horizon: T,
}

impl<T: Time> Instance<T> {
    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn machine_name(&self, k: usize) -> &str {
        &self.machines[k]
    }

    pub fn job_name(&self, j: usize) -> &str {
        &self.jobs[j]
    }

    pub fn machine_names(&self) -> &[String] {
        &self.machines
    }

    pub fn job_names(&self) -> &[String] {
        &self.jobs
    }

    pub fn machine_index(&self, name: &str) -> Option<usize> {
        self.machines.iter().position(|m| m == name)
    }

    pub fn job_index(&self, name: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j == name)
    }

    /// Eligible machines of job `j`, ascending.
    pub fn cap(&self, j: usize) -> &[usize] {
        &self.cap[j]
    }

    /// Jobs that machine `k` can process, ascending.
    pub fn eligible_jobs(&self, k: usize) -> &[usize] {
        &self.machine_jobs[k]
    }

    pub fn is_eligible(&self, j: usize, k: usize) -> bool {
        self.eligible[j * self.machines.len() + k]
    }

    pub fn duration(&self, j: usize, k: usize) -> Option<T> {
        self.is_eligible(j, k).then(|| self.d(j, k))
    }

    pub fn release(&self, j: usize, k: usize) -> Option<T> {
        self.is_eligible(j, k).then(|| self.r(j, k))
    }

    /// Setup time of `to` directly after `from` on machine `k`; defined only
    /// for distinct jobs both eligible on `k`.
    pub fn setup(&self, from: usize, to: usize, k: usize) -> Option<T> {
        (from != to && self.is_eligible(from, k) && self.is_eligible(to, k)).then(|| self.s(from, to, k))
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    #[inline]
    pub(crate) fn d(&self, j: usize, k: usize) -> T {
        self.duration[j * self.machines.len() + k]
    }

    #[inline]
    pub(crate) fn r(&self, j: usize, k: usize) -> T {
        self.release[j * self.machines.len() + k]
    }

    #[inline]
    pub(crate) fn s(&self, from: usize, to: usize, k: usize) -> T {
        let n = self.jobs.len();
        self.setup[(k * n + from) * n + to]
    }

    /// Smallest horizon satisfying the instance invariant:
    /// max over machines of (max release + Σ eligible (duration + max incoming setup)).
    pub fn required_horizon(&self) -> Result<T, ModelError> {
        let mut required: u128 = 0;
        for k in 0..self.machine_count() {
            let jobs = &self.machine_jobs[k];
            let max_release = jobs.iter().map(|&j| self.r(j, k).as_u128()).max().unwrap_or(0);
            let mut load = max_release;
            for &j in jobs {
                let max_in = jobs.iter().filter(|&&i| i != j).map(|&i| self.s(i, j, k).as_u128()).max().unwrap_or(0);
                load += self.d(j, k).as_u128() + max_in;
            }
            required = required.max(load);
        }
        T::from_u128(required).ok_or(ModelError::Overflow)
    }

    /// Sub-instance on the given machines and jobs (both ascending), with ids
    /// renumbered densely. Fails if a kept job has no kept eligible machine.
    pub fn restrict(&self, machines: &[usize], jobs: &[usize]) -> Result<Instance<T>, ModelError> {
        let mut b = InstanceBuilder::named(
            machines.iter().map(|&k| self.machines[k].clone()).collect(),
            jobs.iter().map(|&j| self.jobs[j].clone()).collect(),
        );
        for (nj, &j) in jobs.iter().enumerate() {
            for (nk, &k) in machines.iter().enumerate() {
                if self.is_eligible(j, k) {
                    b = b.eligible(nj, nk, self.d(j, k), self.r(j, k));
                }
            }
        }
        for (nk, &k) in machines.iter().enumerate() {
            for (ni, &i) in jobs.iter().enumerate() {
                for (nj, &j) in jobs.iter().enumerate() {
                    if i != j && self.is_eligible(i, k) && self.is_eligible(j, k) {
                        let s = self.s(i, j, k);
                        if s != T::zero() {
                            b = b.setup(ni, nj, nk, s);
                        }
                    }
                }
            }
        }
        b.horizon(self.horizon).build()
    }
}

/// Incremental constructor for [`Instance`]; all validation happens in
/// [`InstanceBuilder::build`].
#[derive(Debug, Clone)]
pub struct InstanceBuilder<T> {
    machines: Vec<String>,
    jobs: Vec<String>,
    entries: Vec<(usize, usize, T, T)>,
    setups: Vec<(usize, usize, usize, T)>,
    horizon: Option<T>,
}

impl<T: Time> InstanceBuilder<T> {
    /// `m` machines named `m1..`, `n` jobs named `j1..`.
    pub fn new(m: usize, n: usize) -> Self {
        Self::named((1..=m).map(|k| format!("m{k}")).collect(), (1..=n).map(|j| format!("j{j}")).collect())
    }

    pub fn named(machines: Vec<String>, jobs: Vec<String>) -> Self {
        InstanceBuilder { machines, jobs, entries: Vec::new(), setups: Vec::new(), horizon: None }
    }

    /// Makes `job` eligible on `machine` with the given duration and release date.
    pub fn eligible(mut self, job: usize, machine: usize, duration: T, release: T) -> Self {
        self.entries.push((job, machine, duration, release));
        self
    }

    pub fn setup(mut self, from: usize, to: usize, machine: usize, time: T) -> Self {
        self.setups.push((from, to, machine, time));
        self
    }

    pub fn horizon(mut self, h: T) -> Self {
        self.horizon = Some(h);
        self
    }

    pub fn build(self) -> Result<Instance<T>, ModelError> {
        let m = self.machines.len();
        let n = self.jobs.len();
        if m == 0 {
            return Err(ModelError::NoMachines);
        }
        let mut eligible = vec![false; n * m];
        let mut duration = vec![T::zero(); n * m];
        let mut release = vec![T::zero(); n * m];
        for &(j, k, d, r) in &self.entries {
            if j >= n {
                return Err(ModelError::UnknownJob(j));
            }
            if k >= m {
                return Err(ModelError::UnknownMachine(k));
            }
            if d == T::zero() {
                return Err(ModelError::ZeroDuration { job: self.jobs[j].clone(), machine: self.machines[k].clone() });
            }
            let idx = j * m + k;
            if eligible[idx] && (duration[idx] != d || release[idx] != r) {
                return Err(ModelError::Conflict {
                    what: format!("eligibility of {} on {}", self.jobs[j], self.machines[k]),
                });
            }
            eligible[idx] = true;
            duration[idx] = d;
            release[idx] = r;
        }
        let cap: Vec<Vec<usize>> = (0..n).map(|j| (0..m).filter(|&k| eligible[j * m + k]).collect()).collect();
        if let Some(j) = cap.iter().position(|c| c.is_empty()) {
            return Err(ModelError::NoEligibleMachine { job: self.jobs[j].clone() });
        }
        let machine_jobs: Vec<Vec<usize>> = (0..m).map(|k| (0..n).filter(|&j| eligible[j * m + k]).collect()).collect();

        let mut setup = vec![T::zero(); m * n * n];
        let mut seen = vec![false; m * n * n];
        for &(i, j, k, s) in &self.setups {
            if i >= n || j >= n {
                return Err(ModelError::UnknownJob(i.max(j)));
            }
            if k >= m {
                return Err(ModelError::UnknownMachine(k));
            }
            if i == j || !eligible[i * m + k] || !eligible[j * m + k] {
                return Err(ModelError::IneligibleSetup {
                    from: self.jobs[i].clone(),
                    to: self.jobs[j].clone(),
                    machine: self.machines[k].clone(),
                });
            }
            let idx = (k * n + i) * n + j;
            if seen[idx] && setup[idx] != s {
                return Err(ModelError::Conflict {
                    what: format!("setup {}->{} on {}", self.jobs[i], self.jobs[j], self.machines[k]),
                });
            }
            seen[idx] = true;
            setup[idx] = s;
        }

        let mut inst = Instance {
            machines: self.machines,
            jobs: self.jobs,
            cap,
            machine_jobs,
            eligible,
            duration,
            release,
            setup,
            horizon: T::zero(),
        };
        let required = inst.required_horizon()?;
        inst.horizon = match self.horizon {
            Some(h) if h < required => {
                return Err(ModelError::HorizonTooSmall { given: h.to_string(), required: required.to_string() })
            }
            Some(h) => h,
            None => default_horizon(&inst)?,
        };
        Ok(inst)
    }
}

/// max release + Σ_j (max eligible duration of j + max incoming setup of j).
fn default_horizon<T: Time>(inst: &Instance<T>) -> Result<T, ModelError> {
    let n = inst.job_count();
    let mut max_release: u128 = 0;
    let mut total: u128 = 0;
    for j in 0..n {
        let mut max_d = 0u128;
        let mut max_s = 0u128;
        for &k in inst.cap(j) {
            max_release = max_release.max(inst.r(j, k).as_u128());
            max_d = max_d.max(inst.d(j, k).as_u128());
            for &i in inst.eligible_jobs(k) {
                if i != j {
                    max_s = max_s.max(inst.s(i, j, k).as_u128());
                }
            }
        }
        total += max_d + max_s;
    }
    T::from_u128(max_release + total).ok_or(ModelError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_jobs() -> Instance<u64> {
        InstanceBuilder::new(1, 2)
            .eligible(0, 0, 5, 0)
            .eligible(1, 0, 5, 0)
            .setup(0, 1, 0, 4)
            .setup(1, 0, 0, 2)
            .build()
            .unwrap()
    }

    #[test]
    fn accessors() {
        let inst = two_jobs();
        assert_eq!(inst.machine_count(), 1);
        assert_eq!(inst.job_count(), 2);
        assert_eq!(inst.duration(0, 0), Some(5));
        assert_eq!(inst.setup(0, 1, 0), Some(4));
        assert_eq!(inst.setup(1, 0, 0), Some(2));
        assert_eq!(inst.setup(0, 0, 0), None);
        // 0 + (5 + 2) + (5 + 4)
        assert_eq!(inst.horizon(), 16);
        assert_eq!(inst.required_horizon().unwrap(), 16);
    }

    #[test]
    fn empty_cap_rejected() {
        let err = InstanceBuilder::<u64>::new(1, 2).eligible(0, 0, 5, 0).build().unwrap_err();
        assert!(matches!(err, ModelError::NoEligibleMachine { ref job } if job == "j2"));
    }

    #[test]
    fn setup_on_ineligible_pair_rejected() {
        let err = InstanceBuilder::<u64>::new(2, 2)
            .eligible(0, 0, 5, 0)
            .eligible(1, 1, 5, 0)
            .setup(0, 1, 0, 3)
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::IneligibleSetup { .. }));
    }

    #[test]
    fn horizon_too_small_rejected() {
        let err = InstanceBuilder::<u64>::new(1, 1).eligible(0, 0, 5, 7).horizon(11).build().unwrap_err();
        assert!(matches!(err, ModelError::HorizonTooSmall { .. }));
        assert!(InstanceBuilder::<u64>::new(1, 1).eligible(0, 0, 5, 7).horizon(12).build().is_ok());
    }

    #[test]
    fn zero_jobs_is_valid() {
        let inst = InstanceBuilder::<u64>::new(2, 0).build().unwrap();
        assert_eq!(inst.job_count(), 0);
        assert_eq!(inst.horizon(), 0);
    }

    #[test]
    fn restrict_keeps_data() {
        let inst = InstanceBuilder::<u64>::new(2, 3)
            .eligible(0, 0, 5, 1)
            .eligible(1, 0, 6, 2)
            .eligible(1, 1, 7, 3)
            .eligible(2, 1, 8, 4)
            .setup(0, 1, 0, 9)
            .setup(2, 1, 1, 4)
            .build()
            .unwrap();
        let sub = inst.restrict(&[1], &[1, 2]).unwrap();
        assert_eq!(sub.machine_names(), &["m2".to_string()]);
        assert_eq!(sub.job_names(), &["j2".to_string(), "j3".to_string()]);
        assert_eq!(sub.duration(0, 0), Some(7));
        assert_eq!(sub.setup(1, 0, 0), Some(4));
        assert_eq!(sub.horizon(), inst.horizon());
        assert!(inst.restrict(&[1], &[0]).is_err());
    }
}
