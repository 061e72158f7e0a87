use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use lexsched::bench::{self, BenchInstance, SuiteManifest};
use lexsched::instgen::{generate_with_info, Dedication, GenSpec, InstanceClass};
use lexsched::io::{self, Objective};
use lexsched::lexopt::{approximate_lex, optimize_lex_exact, BudgetPolicy, LevelStatus, LexOptConfig, LexOptError};
use lexsched::model::{evaluate, lex_makespan};
use lexsched::oracle::{self, OracleError};
use lexsched::search::{find_schedule, minimize_makespan, LevelBound, SearchBudget, SearchStatus};
use lexsched::{Instance64, Schedule};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lexsched", version, about = "Lexicographic makespan scheduling on unrelated parallel machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Facts,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Makespan,
    Lex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Geometric,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Minizinc,
    Facts,
    Structured,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate {
        #[arg(long, default_value = "M3")]
        class: InstanceClass,
        #[arg(long, default_value = "low")]
        dedication: Dedication,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Facts)]
        format: Format,
    },
    /// Evaluate a schedule (sequence facts) on an instance.
    Evaluate {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Solve an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Lex)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Lex components to optimize; all machines when omitted.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 1)]
        granularity: u64,
        /// Total time budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Total search node budget.
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Geometric)]
        budget_policy: PolicyArg,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        heuristics: Switch,
        /// Only look for a schedule with makespan at most this value.
        #[arg(long)]
        bound: Option<u64>,
        /// Input format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Write the schedule as sequence facts to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export an instance, by default as a MiniZinc model.
    Export {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Minizinc)]
        format: ExportFormat,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Lex)]
        objective: ObjectiveArg,
        #[arg(long, value_enum)]
        input_format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force lex optimum of a tiny instance.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a benchmark suite and write CSVs.
    Bench {
        /// TOML suite manifest; the default desk-scale suite when omitted.
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "bench-out")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: io::IoError },
    #[error(transparent)]
    Model(#[from] lexsched::ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
    #[error("{0}")]
    Usage(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path, format: Option<Format>) -> Result<Instance64, CliError> {
    let text = read(path)?;
    let format = format.unwrap_or(if path.extension().is_some_and(|e| e == "json") {
        Format::Structured
    } else {
        Format::Facts
    });
    let parsed = match format {
        Format::Facts => io::parse_facts(&text),
        Format::Structured => io::from_structured(&text).map(|(inst, _)| inst),
    };
    parsed.map_err(|source| CliError::Input { path: path.to_path_buf(), source })
}

fn report(inst: &Instance64, schedule: &Schedule) -> Result<String, CliError> {
    let e = evaluate(schedule, inst)?;
    let mut out = format!("lex {}\nmakespan {}\n", lex_makespan(&e), e.makespan);
    for k in 0..inst.machine_count() {
        out.push_str(&format!("span {} {}\n", inst.machine_name(k), e.span[k]));
    }
    for j in 0..inst.job_count() {
        out.push_str(&format!(
            "job {} machine {} start {} completion {}\n",
            inst.job_name(j),
            inst.machine_name(schedule.assignment()[j]),
            e.start[j],
            e.completion[j]
        ));
    }
    Ok(out)
}

fn finish_solution(inst: &Instance64, schedule: &Schedule, out: Option<&Path>) -> Result<(), CliError> {
    print!("{}", report(inst, schedule)?);
    write_or_print(out, &io::emit_schedule_facts(schedule, inst))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Generate { class, dedication, seed, out, format } => {
            let (inst, info) = generate_with_info::<u64>(&GenSpec::new(class, dedication, seed))?;
            let text = match format {
                Format::Facts => {
                    let head = format!(
                        "% generated: class {class:?}, dedication {dedication:?}, seed {seed}, prng {}\n",
                        info.prng
                    );
                    head + &io::emit_facts(&inst)
                }
                Format::Structured => io::to_structured(&inst, Some(&info)) + "\n",
            };
            write_or_print(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Evaluate { instance, schedule, format } => {
            let inst = load_instance(&instance, format)?;
            let text = read(&schedule)?;
            let s =
                io::parse_schedule_facts(&text, &inst).map_err(|source| CliError::Input { path: schedule, source })?;
            print!("{}", report(&inst, &s)?);
            Ok(0)
        }
        Command::Solve {
            instance,
            objective,
            method,
            l,
            granularity,
            budget,
            node_limit,
            budget_policy,
            heuristics,
            bound,
            format,
            out,
        } => {
            let inst = load_instance(&instance, format)?;
            let budget = SearchBudget { time_limit: budget.map(Duration::from_secs_f64), node_limit };
            let heuristics = matches!(heuristics, Switch::On);
            if let Some(b) = bound {
                let outcome = find_schedule(&inst, &[LevelBound::at_most(1, b)], heuristics, &budget)?;
                return match outcome.status {
                    SearchStatus::Found => {
                        println!("status found");
                        finish_solution(&inst, outcome.schedule.as_ref().expect("found"), out.as_deref())?;
                        Ok(0)
                    }
                    SearchStatus::ExhaustedInfeasible => {
                        println!("status infeasible");
                        Ok(EXIT_INFEASIBLE)
                    }
                    SearchStatus::BudgetExceeded => {
                        println!("status budget-exceeded");
                        Ok(EXIT_BUDGET)
                    }
                };
            }
            match objective {
                ObjectiveArg::Makespan => {
                    let outcome = minimize_makespan(&inst, heuristics, &budget);
                    match outcome.schedule {
                        Some(s) => {
                            println!("status {}", if outcome.complete { "optimal" } else { "budget-cut" });
                            finish_solution(&inst, &s, out.as_deref())?;
                            Ok(0)
                        }
                        None => {
                            println!("status budget-exceeded");
                            Ok(EXIT_BUDGET)
                        }
                    }
                }
                ObjectiveArg::Lex => {
                    let config = LexOptConfig {
                        l: l.unwrap_or(inst.machine_count()),
                        total_budget: budget,
                        budget_policy: match budget_policy {
                            PolicyArg::Geometric => BudgetPolicy::GeometricHalf,
                            PolicyArg::Uniform => BudgetPolicy::Uniform,
                        },
                        granularity,
                        heuristics,
                    };
                    let result = match method {
                        Method::Exact => optimize_lex_exact(&inst, &config),
                        Method::Approx => approximate_lex(&inst, &config),
                    };
                    match result {
                        Ok(r) => {
                            let levels: Vec<&str> = r
                                .per_level_status
                                .iter()
                                .map(|s| match s {
                                    LevelStatus::ProvedOptimal => "proved-optimal",
                                    LevelStatus::BudgetCut => "budget-cut",
                                })
                                .collect();
                            println!("status found\nlevels {}\nsolver_calls {}", levels.join(" "), r.solver_calls);
                            finish_solution(&inst, &r.schedule, out.as_deref())?;
                            Ok(0)
                        }
                        Err(LexOptError::NoSolution) => {
                            println!("status budget-exceeded");
                            Ok(EXIT_BUDGET)
                        }
                        Err(e) => Err(CliError::Usage(e.to_string())),
                    }
                }
            }
        }
        Command::Export { instance, format, objective, input_format, out } => {
            let inst = load_instance(&instance, input_format)?;
            let text = match format {
                ExportFormat::Minizinc => io::export_minizinc(
                    &inst,
                    match objective {
                        ObjectiveArg::Makespan => Objective::Makespan,
                        ObjectiveArg::Lex => Objective::Lex,
                    },
                ),
                ExportFormat::Facts => io::emit_facts(&inst),
                ExportFormat::Structured => io::to_structured(&inst, None) + "\n",
            };
            write_or_print(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Oracle { instance, l, format } => {
            let inst = load_instance(&instance, format)?;
            let r = oracle::oracle_lex_optimum(&inst, l.unwrap_or(inst.machine_count()))?;
            println!("schedules {}", r.schedule_count);
            finish_solution(&inst, &r.best_schedule, None)?;
            Ok(0)
        }
        Command::Bench { manifest, out_dir } => {
            let (manifest, base) = match &manifest {
                Some(path) => {
                    let m = SuiteManifest::from_toml(&read(path)?)?;
                    (m, path.parent().map(Path::to_path_buf).unwrap_or_default())
                }
                None => (SuiteManifest::default_suite(), PathBuf::new()),
            };
            let mut instances = manifest.generated_instances()?;
            for file in &manifest.files {
                let path = base.join(file);
                let inst = load_instance(&path, None)?;
                instances.push(BenchInstance { id: file.display().to_string(), instance: inst });
            }
            let records = bench::run_suite(&instances, &manifest.configs, &manifest.budget(), manifest.threads)?;
            let oracle_map: Option<HashMap<String, Vec<u64>>> = manifest.oracle.then(|| {
                instances
                    .iter()
                    .filter_map(|bi| {
                        let r = oracle::oracle_lex_optimum(&bi.instance, bi.instance.machine_count()).ok()?;
                        Some((bi.id.clone(), r.best_lex.into_vec()))
                    })
                    .collect()
            });
            let table = bench::aggregate(&records, oracle_map.as_ref());
            fs::create_dir_all(&out_dir).map_err(|source| CliError::File { path: out_dir.clone(), source })?;
            let create = |name: &str| {
                let path = out_dir.join(name);
                fs::File::create(&path).map_err(|source| CliError::File { path, source })
            };
            bench::write_records_csv(&records, create("records.csv")?)?;
            bench::write_aggregate_csv(&table, create("aggregate.csv")?)?;
            for (config, curve) in bench::curves_by_config(&records) {
                bench::write_curve_csv(&curve, create(&format!("curve-{config}.csv"))?)?;
            }
            println!("config,feasible,best,optimal");
            for (id, a) in &table {
                println!("{id},{},{},{}", a.feasible, a.best, a.optimal);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
