//! Random benchmark instances with low or high machine dedication.
//!
//! Durations, setups and release dates are uniform over closed ranges;
//! release dates are bounded by a load-based `r_max`. Generation is a pure
//! function of the spec (including its seed) and uses ChaCha8.

use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, InstanceBuilder, ModelError};
use crate::time::Time;

/// Identifier of the generator algorithm, recorded with generated instances.
pub const PRNG_ID: &str = "chacha8-rand0.8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceClass {
    M3,
    M5,
    M10,
    M15,
    M20,
    Custom { machines: usize, min_jobs: usize, max_jobs: usize },
}

impl InstanceClass {
    pub fn machines(&self) -> usize {
        match *self {
            InstanceClass::M3 => 3,
            InstanceClass::M5 => 5,
            InstanceClass::M10 => 10,
            InstanceClass::M15 => 15,
            InstanceClass::M20 => 20,
            InstanceClass::Custom { machines, .. } => machines,
        }
    }

    /// Inclusive job-count range.
    pub fn job_range(&self) -> (usize, usize) {
        match *self {
            InstanceClass::M3 => (5, 50),
            InstanceClass::M5 => (10, 50),
            InstanceClass::M10 => (50, 200),
            InstanceClass::M15 => (100, 200),
            InstanceClass::M20 => (150, 200),
            InstanceClass::Custom { min_jobs, max_jobs, .. } => (min_jobs, max_jobs),
        }
    }

    pub fn standard() -> [InstanceClass; 5] {
        [InstanceClass::M3, InstanceClass::M5, InstanceClass::M10, InstanceClass::M15, InstanceClass::M20]
    }
}

impl std::str::FromStr for InstanceClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "M3" => Ok(InstanceClass::M3),
            "M5" => Ok(InstanceClass::M5),
            "M10" => Ok(InstanceClass::M10),
            "M15" => Ok(InstanceClass::M15),
            "M20" => Ok(InstanceClass::M20),
            other => Err(format!("unknown instance class {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dedication {
    /// Each job gets a uniformly sized random set of machines.
    Low,
    /// 80% of the jobs may only run on a pool of 20% of the machines.
    High,
}

impl std::str::FromStr for Dedication {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Dedication::Low),
            "high" => Ok(Dedication::High),
            other => Err(format!("unknown dedication {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub class: InstanceClass,
    pub dedication: Dedication,
    pub seed: u64,
    pub duration_range: (u64, u64),
    pub setup_range: (u64, u64),
}

impl GenSpec {
    pub fn new(class: InstanceClass, dedication: Dedication, seed: u64) -> Self {
        GenSpec { class, dedication, seed, duration_range: (10, 500), setup_range: (0, 100) }
    }
}

/// Generator metadata stored alongside an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationInfo {
    pub spec: GenSpec,
    pub prng: String,
    /// High dedication: the machine pool; empty otherwise.
    pub pool: Vec<usize>,
    /// High dedication: jobs restricted to the pool; empty otherwise.
    pub restricted_jobs: Vec<usize>,
    pub r_max: u64,
}

/// Instance data before release dates are drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draft {
    pub machines: usize,
    pub cap: Vec<Vec<usize>>,
    /// `[job * machines + machine]`, 0 where ineligible.
    pub duration: Vec<u64>,
    /// `[(machine * n + from) * n + to]`, 0 where undefined.
    pub setup: Vec<u64>,
}

impl Draft {
    fn jobs(&self) -> usize {
        self.cap.len()
    }

    fn eligible(&self, j: usize, k: usize) -> bool {
        self.cap[j].binary_search(&k).is_ok()
    }

    pub fn from_instance<T: Time>(inst: &Instance<T>) -> Self {
        let (m, n) = (inst.machine_count(), inst.job_count());
        let mut duration = vec![0; n * m];
        let mut setup = vec![0; m * n * n];
        for j in 0..n {
            for &k in inst.cap(j) {
                duration[j * m + k] = inst.d(j, k).to_u64().expect("fits u64");
                for &i in inst.eligible_jobs(k) {
                    if i != j {
                        setup[(k * n + i) * n + j] = inst.s(i, j, k).to_u64().expect("fits u64");
                    }
                }
            }
        }
        Draft { machines: m, cap: (0..n).map(|j| inst.cap(j).to_vec()).collect(), duration, setup }
    }
}

/// `r_max = floor( (1/m) Σ_j (1/|cap(j)|) (Σ_{k∈cap(j)} d_{j,k} + Σ_{j', k∈cap(j')} s_{j',j,k}) )`
/// where setups into `j` on machines `j` cannot use contribute 0. Evaluated
/// exactly over the common denominator `lcm(|cap(j)|) · m`.
pub fn compute_rmax(draft: &Draft) -> u64 {
    let (m, n) = (draft.machines, draft.jobs());
    let denom = draft.cap.iter().fold(1u128, |acc, c| acc.lcm(&(c.len() as u128)));
    let mut numer: u128 = 0;
    for j in 0..n {
        let mut a: u128 = draft.cap[j].iter().map(|&k| draft.duration[j * m + k] as u128).sum();
        for jp in 0..n {
            for &k in &draft.cap[jp] {
                if jp != j && draft.eligible(j, k) {
                    a += draft.setup[(k * n + jp) * n + j] as u128;
                }
            }
        }
        numer += a * (denom / draft.cap[j].len() as u128);
    }
    u64::try_from(numer / (denom * m as u128)).expect("r_max fits u64")
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[usize]) -> Vec<usize> {
    let size = rng.gen_range(1..=from.len());
    let mut v: Vec<usize> = sample(rng, from.len(), size).into_iter().map(|i| from[i]).collect();
    v.sort_unstable();
    v
}

pub fn generate<T: Time>(spec: &GenSpec) -> Result<Instance<T>, ModelError> {
    generate_with_info(spec).map(|(inst, _)| inst)
}

pub fn generate_with_info<T: Time>(spec: &GenSpec) -> Result<(Instance<T>, GenerationInfo), ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.class.machines();
    if m == 0 {
        return Err(ModelError::NoMachines);
    }
    let (lo, hi) = spec.class.job_range();
    let n = rng.gen_range(lo..=hi);
    let all: Vec<usize> = (0..m).collect();

    let mut pool = Vec::new();
    let mut restricted_jobs = Vec::new();
    let cap: Vec<Vec<usize>> = match spec.dedication {
        Dedication::Low => (0..n).map(|_| random_subset(&mut rng, &all)).collect(),
        Dedication::High => {
            let pool_size = m.div_ceil(5);
            pool = sample(&mut rng, m, pool_size).into_vec();
            pool.sort_unstable();
            restricted_jobs = sample(&mut rng, n, (4 * n).div_ceil(5)).into_vec();
            restricted_jobs.sort_unstable();
            (0..n)
                .map(|j| {
                    if restricted_jobs.binary_search(&j).is_ok() {
                        random_subset(&mut rng, &pool)
                    } else {
                        random_subset(&mut rng, &all)
                    }
                })
                .collect()
        }
    };

    let (dmin, dmax) = spec.duration_range;
    let (smin, smax) = spec.setup_range;
    let mut duration = vec![0u64; n * m];
    for (j, ks) in cap.iter().enumerate() {
        for &k in ks {
            duration[j * m + k] = rng.gen_range(dmin..=dmax);
        }
    }
    let machine_jobs: Vec<Vec<usize>> =
        (0..m).map(|k| (0..n).filter(|&j| cap[j].binary_search(&k).is_ok()).collect()).collect();
    let mut setup = vec![0u64; m * n * n];
    for (k, jobs) in machine_jobs.iter().enumerate() {
        for &i in jobs {
            for &j in jobs {
                if i != j {
                    setup[(k * n + i) * n + j] = rng.gen_range(smin..=smax);
                }
            }
        }
    }
    let draft = Draft { machines: m, cap, duration, setup };
    let r_max = compute_rmax(&draft);

    let conv = |v: u64| T::from_u64(v).ok_or(ModelError::Overflow);
    let mut b = InstanceBuilder::<T>::new(m, n);
    for (j, ks) in draft.cap.iter().enumerate() {
        for &k in ks {
            let release = rng.gen_range(0..=r_max);
            b = b.eligible(j, k, conv(draft.duration[j * m + k])?, conv(release)?);
        }
    }
    for (k, jobs) in machine_jobs.iter().enumerate() {
        for &i in jobs {
            for &j in jobs {
                if i != j {
                    b = b.setup(i, j, k, conv(draft.setup[(k * n + i) * n + j])?);
                }
            }
        }
    }
    let inst = b.build()?;
    let info = GenerationInfo { spec: *spec, prng: PRNG_ID.to_string(), pool, restricted_jobs, r_max };
    Ok((inst, info))
}
