//! Single-document JSON format for tooling.
//!
//! ```json
//! {
//!   "machines": ["m1"], "jobs": ["j1", "j2"], "horizon": 16,
//!   "caps": [[0], [0]], "durations": [[5], [5]], "releases": [[0], [0]],
//!   "setups": [{"from": 0, "to": 1, "machine": 0, "time": 4}],
//!   "generator": { ... }
//! }
//! ```
//!
//! `caps[j]` lists machine indices of job `j`; `durations[j]` and
//! `releases[j]` are aligned with it. Setups not listed are 0.

use serde::{Deserialize, Serialize};

use crate::instgen::GenerationInfo;
use crate::io::IoError;
use crate::model::{Instance, InstanceBuilder, ModelError};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupEntry<T> {
    pub from: usize,
    pub to: usize,
    pub machine: usize,
    pub time: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Time"))]
pub struct StructuredInstance<T> {
    pub machines: Vec<String>,
    pub jobs: Vec<String>,
    pub horizon: T,
    pub caps: Vec<Vec<usize>>,
    pub durations: Vec<Vec<T>>,
    pub releases: Vec<Vec<T>>,
    pub setups: Vec<SetupEntry<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GenerationInfo>,
}

impl<T: Time> StructuredInstance<T> {
    pub fn from_instance(inst: &Instance<T>, generator: Option<GenerationInfo>) -> Self {
        let n = inst.job_count();
        let caps: Vec<Vec<usize>> = (0..n).map(|j| inst.cap(j).to_vec()).collect();
        let durations = caps.iter().enumerate().map(|(j, ks)| ks.iter().map(|&k| inst.d(j, k)).collect()).collect();
        let releases = caps.iter().enumerate().map(|(j, ks)| ks.iter().map(|&k| inst.r(j, k)).collect()).collect();
        let mut setups = Vec::new();
        for k in 0..inst.machine_count() {
            let jobs = inst.eligible_jobs(k);
            for &from in jobs {
                for &to in jobs {
                    let time = inst.s(from, to, k);
                    if from != to && time != T::zero() {
                        setups.push(SetupEntry { from, to, machine: k, time });
                    }
                }
            }
        }
        StructuredInstance {
            machines: inst.machine_names().to_vec(),
            jobs: inst.job_names().to_vec(),
            horizon: inst.horizon(),
            caps,
            durations,
            releases,
            setups,
            generator,
        }
    }

    pub fn to_instance(&self) -> Result<Instance<T>, ModelError> {
        let n = self.jobs.len();
        if self.caps.len() != n || self.durations.len() != n || self.releases.len() != n {
            return Err(ModelError::ShapeMismatch {
                expected: format!("{n} jobs"),
                found: format!("{} caps", self.caps.len()),
            });
        }
        let mut b = InstanceBuilder::named(self.machines.clone(), self.jobs.clone());
        for (j, ks) in self.caps.iter().enumerate() {
            for len in [self.durations[j].len(), self.releases[j].len()] {
                if len != ks.len() {
                    return Err(ModelError::ShapeMismatch {
                        expected: format!("{} values", ks.len()),
                        found: format!("{len} values"),
                    });
                }
            }
            for (i, &k) in ks.iter().enumerate() {
                b = b.eligible(j, k, self.durations[j][i], self.releases[j][i]);
            }
        }
        for s in &self.setups {
            b = b.setup(s.from, s.to, s.machine, s.time);
        }
        b.horizon(self.horizon).build()
    }
}

pub fn to_structured<T: Time>(inst: &Instance<T>, generator: Option<&GenerationInfo>) -> String {
    serde_json::to_string_pretty(&StructuredInstance::from_instance(inst, generator.cloned())).expect("serializable")
}

pub fn from_structured<T: Time>(text: &str) -> Result<(Instance<T>, Option<GenerationInfo>), IoError> {
    let doc: StructuredInstance<T> = serde_json::from_str(text)?;
    let inst = doc.to_instance()?;
    Ok((inst, doc.generator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate_with_info, Dedication, GenSpec, InstanceClass};

    #[test]
    fn round_trip_with_metadata() {
        let (inst, info) = generate_with_info::<u64>(&GenSpec::new(InstanceClass::M3, Dedication::High, 5)).unwrap();
        let text = to_structured(&inst, Some(&info));
        let (back, meta) = from_structured::<u64>(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(meta, Some(info));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let text = r#"{"machines":["m1"],"jobs":["j1"],"horizon":9,"caps":[[0]],"durations":[[]],"releases":[[0]],"setups":[]}"#;
        assert!(matches!(from_structured::<u64>(text), Err(IoError::Model(ModelError::ShapeMismatch { .. }))));
        assert!(matches!(from_structured::<u64>("{"), Err(IoError::Json(_))));
    }
}
