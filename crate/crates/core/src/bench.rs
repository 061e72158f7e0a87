//! Benchmark harness: runs solver configurations over instance sets,
//! aggregates feasible/best/optimal counts and builds machine completion
//! rate curves `f(t) = M(S,t) / m`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instgen::{generate, Dedication, GenSpec, InstanceClass};
use crate::lexopt::{approximate_lex, optimize_lex_exact, BudgetPolicy, LevelStatus, LexOptConfig, LexOptError};
use crate::model::{completion_count, lex_makespan, Instance, MachineSpans};
use crate::search::{minimize_makespan, SearchBudget, SearchStatus};
use crate::time::Time;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Makespan,
    LexExact,
    LexApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub id: String,
    pub kind: SolverKind,
    /// Lex components to optimize; `None` means all machines.
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default = "one")]
    pub granularity: u64,
    #[serde(default = "yes")]
    pub heuristics: bool,
    #[serde(default = "geometric")]
    pub budget_policy: BudgetPolicy,
    /// Overrides the suite's node limit for this configuration.
    #[serde(default)]
    pub node_limit: Option<u64>,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn geometric() -> BudgetPolicy {
    BudgetPolicy::GeometricHalf
}

impl SolverConfig {
    pub fn new(id: impl Into<String>, kind: SolverKind) -> Self {
        SolverConfig {
            id: id.into(),
            kind,
            l: None,
            granularity: 1,
            heuristics: true,
            budget_policy: BudgetPolicy::GeometricHalf,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Found,
    Infeasible,
    BudgetExceeded,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub config_id: String,
    pub status: RunStatus,
    /// Present iff `status` is `Found`.
    pub lex: Option<Vec<u64>>,
    pub wall_time: Duration,
    pub per_level_status: Vec<LevelStatus>,
    pub nodes: u64,
    /// The run had a wall-clock limit, so its outcome is not reproducible.
    pub wall_clock_limited: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: String,
    pub instance: Instance<u64>,
}

fn solve_one(
    inst: &Instance<u64>,
    config: &SolverConfig,
    budget: &SearchBudget,
) -> (RunStatus, Option<Vec<u64>>, Vec<LevelStatus>, u64, Option<String>) {
    let m = inst.machine_count();
    match config.kind {
        SolverKind::Makespan => {
            let out = minimize_makespan(inst, config.heuristics, budget);
            match (out.status, out.evaluation) {
                (SearchStatus::Found, Some(e)) => {
                    let level = if out.complete { LevelStatus::ProvedOptimal } else { LevelStatus::BudgetCut };
                    (RunStatus::Found, Some(lex_makespan(&e).into_vec()), vec![level], out.nodes, None)
                }
                (SearchStatus::ExhaustedInfeasible, _) => (RunStatus::Infeasible, None, Vec::new(), out.nodes, None),
                _ => (RunStatus::BudgetExceeded, None, Vec::new(), out.nodes, None),
            }
        }
        SolverKind::LexExact | SolverKind::LexApprox => {
            let cfg = LexOptConfig {
                l: config.l.unwrap_or(m),
                total_budget: *budget,
                budget_policy: config.budget_policy,
                granularity: config.granularity,
                heuristics: config.heuristics,
            };
            let result = if config.kind == SolverKind::LexExact {
                optimize_lex_exact(inst, &cfg)
            } else {
                approximate_lex(inst, &cfg)
            };
            match result {
                Ok(r) => (RunStatus::Found, Some(r.lex.into_vec()), r.per_level_status, r.nodes, None),
                Err(LexOptError::NoSolution) => (RunStatus::BudgetExceeded, None, Vec::new(), 0, None),
                Err(e) => (RunStatus::Error, None, Vec::new(), 0, Some(e.to_string())),
            }
        }
    }
}

/// One record per (instance, config), sorted by instance id then config id.
/// `limit` is the per-run budget; a config's own node limit overrides it.
pub fn run_suite(
    instances: &[BenchInstance],
    configs: &[SolverConfig],
    limit: &SearchBudget,
    threads: Option<usize>,
) -> Result<Vec<RunRecord>, BenchError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build()?;
    let jobs: Vec<(&BenchInstance, &SolverConfig)> =
        instances.iter().flat_map(|i| configs.iter().map(move |c| (i, c))).collect();
    let mut records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|(bi, config)| {
                let mut budget = *limit;
                if let Some(n) = config.node_limit {
                    budget.node_limit = Some(n);
                }
                let started = Instant::now();
                let (status, lex, per_level_status, nodes, message) = solve_one(&bi.instance, config, &budget);
                RunRecord {
                    instance_id: bi.id.clone(),
                    config_id: config.id.clone(),
                    status,
                    lex,
                    wall_time: started.elapsed(),
                    per_level_status,
                    nodes,
                    wall_clock_limited: budget.time_limit.is_some(),
                    message,
                }
            })
            .collect()
    });
    records.sort_by(|a, b| (&a.instance_id, &a.config_id).cmp(&(&b.instance_id, &b.config_id)));
    Ok(records)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub feasible: usize,
    pub best: usize,
    pub optimal: usize,
}

/// Per-config counts. `best` counts every config tying for the lex-minimal
/// tuple of an instance. With an oracle entry for an instance, `optimal`
/// means the record matches the oracle tuple on its optimized levels;
/// otherwise it means every level was proved optimal.
pub fn aggregate(records: &[RunRecord], oracle: Option<&HashMap<String, Vec<u64>>>) -> BTreeMap<String, Aggregate> {
    let mut table: BTreeMap<String, Aggregate> =
        records.iter().map(|r| (r.config_id.clone(), Aggregate::default())).collect();
    let mut best_per_instance: HashMap<&str, &Vec<u64>> = HashMap::new();
    for r in records {
        if let Some(lex) = &r.lex {
            best_per_instance
                .entry(&r.instance_id)
                .and_modify(|b| {
                    if lex < *b {
                        *b = lex;
                    }
                })
                .or_insert(lex);
        }
    }
    for r in records {
        let Some(lex) = &r.lex else { continue };
        let entry = table.get_mut(&r.config_id).expect("config present");
        entry.feasible += 1;
        if best_per_instance.get(r.instance_id.as_str()) == Some(&lex) {
            entry.best += 1;
        }
        let levels = r.per_level_status.len();
        let optimal = match oracle.and_then(|o| o.get(&r.instance_id)) {
            Some(truth) => levels > 0 && lex[..levels] == truth[..levels],
            None => levels > 0 && r.per_level_status.iter().all(|s| *s == LevelStatus::ProvedOptimal),
        };
        if optimal {
            entry.optimal += 1;
        }
    }
    table
}

/// Step function `f(t) = M(S,t) / m`, given by its breakpoints: at each
/// distinct span value `t`, `completed` machines have finished by `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub machines: usize,
    pub points: Vec<(u64, usize)>,
}

impl Curve {
    pub fn fraction_at(&self, t: u64) -> f64 {
        let completed = self.points.iter().take_while(|(bt, _)| *bt <= t).last().map_or(0, |&(_, c)| c);
        completed as f64 / self.machines as f64
    }

    pub fn fractions(&self) -> Vec<(u64, f64)> {
        self.points.iter().map(|&(t, c)| (t, c as f64 / self.machines as f64)).collect()
    }
}

pub fn completion_curve<T: Time>(spans: &impl MachineSpans<T>) -> Curve {
    let distinct: BTreeSet<T> = spans.machine_spans().iter().copied().collect();
    Curve {
        machines: spans.machine_spans().len(),
        points: distinct
            .into_iter()
            .map(|t| (t.to_u64().expect("span fits u64"), completion_count(spans, t)))
            .collect(),
    }
}

/// Pointwise mean of the step functions, evaluated on the union of their
/// breakpoints. The time axis is not normalized.
pub fn average_curves(curves: &[Curve]) -> Vec<(u64, f64)> {
    let times: BTreeSet<u64> = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    times.into_iter().map(|t| (t, curves.iter().map(|c| c.fraction_at(t)).sum::<f64>() / curves.len() as f64)).collect()
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    instance: &'a str,
    config: &'a str,
    status: RunStatus,
    lex: String,
    wall_ms: u128,
    levels: String,
    nodes: u64,
    wall_clock_limited: bool,
    message: &'a str,
}

fn level_tag(s: &LevelStatus) -> &'static str {
    match s {
        LevelStatus::ProvedOptimal => "proved",
        LevelStatus::BudgetCut => "cut",
    }
}

pub fn write_records_csv(records: &[RunRecord], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRecord {
            instance: &r.instance_id,
            config: &r.config_id,
            status: r.status,
            lex: r.lex.as_ref().map_or(String::new(), |l| l.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")),
            wall_ms: r.wall_time.as_millis(),
            levels: r.per_level_status.iter().map(level_tag).collect::<Vec<_>>().join(" "),
            nodes: r.nodes,
            wall_clock_limited: r.wall_clock_limited,
            message: r.message.as_deref().unwrap_or(""),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv(table: &BTreeMap<String, Aggregate>, out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config", "feasible", "best", "optimal"])?;
    for (id, a) in table {
        w.write_record([id.clone(), a.feasible.to_string(), a.best.to_string(), a.optimal.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `(t, mean fraction)` rows after a comment line on the averaging.
pub fn write_curve_csv(points: &[(u64, f64)], mut out: impl Write) -> Result<(), BenchError> {
    writeln!(out, "# mean of raw step functions f(t)=M(S,t)/m on the union of breakpoints; time axis not normalized")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "mean_fraction"])?;
    for (t, f) in points {
        w.write_record([t.to_string(), format!("{f:.6}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Per config, the averaged curve over its found records.
pub fn curves_by_config(records: &[RunRecord]) -> BTreeMap<String, Vec<(u64, f64)>> {
    let mut curves: BTreeMap<String, Vec<Curve>> = BTreeMap::new();
    for r in records {
        if let Some(lex) = &r.lex {
            let lex = crate::model::LexMakespan::from_spans(lex);
            curves.entry(r.config_id.clone()).or_default().push(completion_curve(&lex));
        }
    }
    curves.into_iter().map(|(id, c)| (id, average_curves(&c))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSet {
    pub class: InstanceClass,
    pub dedication: Dedication,
    pub seeds: Vec<u64>,
}

/// Suite description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    #[serde(default)]
    pub time_limit_secs: Option<f64>,
    #[serde(default)]
    pub node_limit: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Cross-check `optimal` with the brute-force oracle where it is small enough.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub generate: Vec<GeneratedSet>,
    /// Instance files in the facts format, relative to the manifest.
    #[serde(default)]
    pub files: Vec<PathBuf>,
    pub configs: Vec<SolverConfig>,
}

impl SuiteManifest {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        Ok(toml::from_str(text)?)
    }

    /// 10 seeds of class M3 under both dedications, 10 s per run.
    pub fn default_suite() -> Self {
        let seeds: Vec<u64> = (0..10).collect();
        SuiteManifest {
            time_limit_secs: Some(10.0),
            node_limit: None,
            threads: None,
            oracle: false,
            generate: [Dedication::Low, Dedication::High]
                .into_iter()
                .map(|dedication| GeneratedSet { class: InstanceClass::M3, dedication, seeds: seeds.clone() })
                .collect(),
            files: Vec::new(),
            configs: vec![
                SolverConfig::new("makespan", SolverKind::Makespan),
                SolverConfig::new("lex-exact", SolverKind::LexExact),
                SolverConfig::new("lex-approx", SolverKind::LexApprox),
            ],
        }
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget { time_limit: self.time_limit_secs.map(Duration::from_secs_f64), node_limit: self.node_limit }
    }

    pub fn generated_instances(&self) -> Result<Vec<BenchInstance>, crate::model::ModelError> {
        let mut out = Vec::new();
        for set in &self.generate {
            for &seed in &set.seeds {
                let spec = GenSpec::new(set.class, set.dedication, seed);
                out.push(BenchInstance { id: instance_id(&spec), instance: generate(&spec)? });
            }
        }
        Ok(out)
    }
}

/// Stable id of a generated instance, e.g. `M3-low-s7`.
pub fn instance_id(spec: &GenSpec) -> String {
    let class = match spec.class {
        InstanceClass::Custom { machines, min_jobs, max_jobs } => format!("C{machines}x{min_jobs}-{max_jobs}"),
        c => format!("{c:?}"),
    };
    let ded = match spec.dedication {
        Dedication::Low => "low",
        Dedication::High => "high",
    };
    format!("{class}-{ded}-s{}", spec.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(instance: &str, config: &str, lex: Option<Vec<u64>>, proved: bool) -> RunRecord {
        RunRecord {
            instance_id: instance.into(),
            config_id: config.into(),
            status: if lex.is_some() { RunStatus::Found } else { RunStatus::BudgetExceeded },
            per_level_status: if lex.is_some() {
                vec![if proved { LevelStatus::ProvedOptimal } else { LevelStatus::BudgetCut }]
            } else {
                Vec::new()
            },
            lex,
            wall_time: Duration::ZERO,
            nodes: 0,
            wall_clock_limited: false,
            message: None,
        }
    }

    #[test]
    fn curve_examples() {
        let c = completion_curve(&crate::model::LexMakespan::from_spans(&[14u64, 9, 9]));
        assert_eq!(c.points, vec![(9, 2), (14, 3)]);
        assert_eq!(c.fractions(), vec![(9, 2.0 / 3.0), (14, 1.0)]);
        let single = completion_curve(&crate::model::LexMakespan::from_spans(&[12u64]));
        assert_eq!(single.fractions(), vec![(12, 1.0)]);
    }

    #[test]
    fn averaging() {
        let a = completion_curve(&crate::model::LexMakespan::from_spans(&[10u64, 4]));
        let b = completion_curve(&crate::model::LexMakespan::from_spans(&[6u64, 6]));
        assert_eq!(average_curves(&[a, b]), vec![(4, 0.25), (6, 0.75), (10, 1.0)]);
    }

    #[test]
    fn aggregate_rules() {
        let records = vec![
            record("a", "x", Some(vec![5, 3]), true),
            record("a", "y", Some(vec![5, 3]), false),
            record("b", "x", Some(vec![7, 2]), true),
            record("b", "y", Some(vec![6, 6]), false),
            record("c", "x", None, false),
        ];
        let t = aggregate(&records, None);
        assert_eq!(t["x"], Aggregate { feasible: 2, best: 1, optimal: 2 });
        assert_eq!(t["y"], Aggregate { feasible: 2, best: 2, optimal: 0 });
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(aggregate(&reversed, None), t);
        let oracle: HashMap<String, Vec<u64>> = [("a".to_string(), vec![5, 3]), ("b".to_string(), vec![6, 6])].into();
        assert_eq!(aggregate(&records, Some(&oracle))["x"].optimal, 1);
    }

    #[test]
    fn suite_cardinality_and_zero_nodes() {
        let manifest = SuiteManifest {
            generate: vec![GeneratedSet {
                class: InstanceClass::Custom { machines: 2, min_jobs: 3, max_jobs: 4 },
                dedication: Dedication::Low,
                seeds: (0..5).collect(),
            }],
            ..SuiteManifest::default_suite()
        };
        let instances = manifest.generated_instances().unwrap();
        let mut starved = SolverConfig::new("starved", SolverKind::LexExact);
        starved.node_limit = Some(0);
        let configs = vec![SolverConfig::new("exact", SolverKind::LexExact), starved];
        let records = run_suite(&instances, &configs, &SearchBudget::unbounded(), Some(2)).unwrap();
        assert_eq!(records.len(), 10);
        for r in records.iter().filter(|r| r.config_id == "starved") {
            assert_eq!(r.status, RunStatus::BudgetExceeded);
            assert!(r.lex.is_none());
        }
        let mut sorted = records.clone();
        sorted.sort_by(|a, b| (&a.instance_id, &a.config_id).cmp(&(&b.instance_id, &b.config_id)));
        assert_eq!(sorted, records);
    }

    #[test]
    fn manifest_toml() {
        let text = r#"
time_limit_secs = 2.5
threads = 2

[[generate]]
class = "M3"
dedication = "high"
seeds = [1, 2]

[[configs]]
id = "exact"
kind = "lex-exact"
budget_policy = "uniform"
"#;
        let m = SuiteManifest::from_toml(text).unwrap();
        assert_eq!(m.configs[0].budget_policy, BudgetPolicy::Uniform);
        assert_eq!(m.generated_instances().unwrap()[1].id, "M3-high-s2");
        assert_eq!(m.budget().time_limit, Some(Duration::from_millis(2500)));
    }

    #[test]
    fn csv_outputs() {
        let mut buf = Vec::new();
        write_records_csv(&[record("a", "x", Some(vec![5, 3]), true)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("instance,config,status,lex"));
        assert!(text.contains("a,x,found,5 3,0,proved"));
        let mut buf = Vec::new();
        write_curve_csv(&[(9, 0.5)], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("t,mean_fraction\n9,0.500000\n"));
    }
}
