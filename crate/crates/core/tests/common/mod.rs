#![allow(dead_code)]

use lexsched::instgen::{generate, Dedication, GenSpec, InstanceClass};
use lexsched::io::parse_facts;
use lexsched::Instance64;

pub const LISTING: &str = "machine(m1).
cap(m1,j1). cap(m1,j2).
job(j1). duration(j1,m1,5). release(j1,m1,0).
job(j2). duration(j2,m1,5). release(j2,m1,0).
setup(j1,j2,m1,4). setup(j2,j1,m1,2).
";

pub fn two_jobs() -> Instance64 {
    parse_facts(LISTING).unwrap()
}

/// Downscaled generator spec: `m` machines and 3 to 6 jobs.
pub fn tiny_spec(m: usize, dedication: Dedication, seed: u64) -> GenSpec {
    GenSpec::new(InstanceClass::Custom { machines: m, min_jobs: 3, max_jobs: 6 }, dedication, seed)
}

/// 60 tiny instances over m in {2, 3} and both dedications.
pub fn tiny_suite() -> Vec<(String, Instance64)> {
    let mut out = Vec::new();
    for m in [2, 3] {
        for dedication in [Dedication::Low, Dedication::High] {
            for seed in 0..15 {
                let spec = tiny_spec(m, dedication, seed);
                out.push((format!("m{m}-{dedication:?}-s{seed}"), generate(&spec).unwrap()));
            }
        }
    }
    out
}
