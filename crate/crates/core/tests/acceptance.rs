//! Acceptance suite: one PASS/FAIL line per criterion. Soft checks are
//! reported but do not affect the exit status.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexsched::bench::completion_curve;
use lexsched::instgen::{generate_with_info, Dedication, GenSpec, InstanceClass};
use lexsched::io::{check_minizinc, emit_facts, export_minizinc, parse_facts, ModelPoint, Objective};
use lexsched::lexopt::{approximate_lex, optimize_lex_exact, split_budget, BudgetPolicy, LevelStatus, LexOptConfig};
use lexsched::model::{compare_lex, dominates_by_completion, evaluate, LexMakespan};
use lexsched::oracle::{enumerate_schedules, oracle_lex_optimum, DEFAULT_LEAF_CAP};
use lexsched::search::{minimize_makespan, minimize_makespan_with, SearchBudget};
use lexsched::{Evaluation64, Instance64, LexMakespan64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct TinyCase {
    id: String,
    inst: Instance64,
    optimum: LexMakespan64,
    exact: Option<LexMakespan64>,
}

fn micro_instance() -> Outcome {
    let started = Instant::now();
    let inst = common::two_jobs();
    let ms = minimize_makespan(&inst, true, &SearchBudget::unbounded());
    let ms_ok = ms.evaluation.as_ref().map(|e| e.makespan) == Some(12)
        && ms.schedule.as_ref().map(|s| s.sequence(0).to_vec()) == Some(vec![1, 0]);
    let lex = optimize_lex_exact(&inst, &LexOptConfig::exact(1)).unwrap();
    let lex_ok = lex.lex.as_slice() == [12] && lex.per_level_status == [LevelStatus::ProvedOptimal];
    let oracle_ok = oracle_lex_optimum(&inst, 1).unwrap().best_lex.as_slice() == [12];
    let elapsed = started.elapsed();
    outcome(
        ms_ok && lex_ok && oracle_ok && elapsed < Duration::from_secs(1),
        format!(
            "makespan 12 via (j2, j1): {ms_ok}; lex (12) proved: {lex_ok}; oracle agrees: {oracle_ok}; {elapsed:.2?}"
        ),
    )
}

fn oracle_equivalence(cases: &mut [TinyCase]) -> Outcome {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    for case in cases.iter_mut() {
        let m = case.inst.machine_count();
        let result = optimize_lex_exact(&case.inst, &LexOptConfig::exact(m)).unwrap();
        if result.lex != case.optimum {
            mismatches.push(format!("{}: {} vs oracle {}", case.id, result.lex, case.optimum));
        }
        case.exact = Some(result.lex);
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches.is_empty() && cases.len() >= 50 && elapsed < Duration::from_secs(300),
        format!(
            "{}/{} tuples match the oracle in {elapsed:.2?} {mismatches:?}",
            cases.len() - mismatches.len(),
            cases.len()
        ),
    )
}

fn random_spans(rng: &mut ChaCha8Rng, m: usize) -> LexMakespan64 {
    let hi = rng.gen_range(1..=12);
    LexMakespan::from_spans(&(0..m).map(|_| rng.gen_range(0..=hi)).collect::<Vec<u64>>())
}

fn completion_dominance(cases: &[TinyCase]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs: Vec<(LexMakespan64, LexMakespan64)> = (0..1500)
        .map(|_| {
            let m = rng.gen_range(1..=6);
            (random_spans(&mut rng, m), random_spans(&mut rng, m))
        })
        .collect();
    for case in cases.iter().take(10) {
        let mut evals: Vec<LexMakespan64> = Vec::new();
        enumerate_schedules(&case.inst, DEFAULT_LEAF_CAP, |_, e| evals.push(LexMakespan::from_spans(&e.span))).unwrap();
        for _ in 0..100 {
            let a = evals[rng.gen_range(0..evals.len())].clone();
            let b = evals[rng.gen_range(0..evals.len())].clone();
            pairs.push((a, b));
        }
    }
    let counterexamples: Vec<String> = pairs
        .iter()
        .filter(|(a, b)| {
            let less = compare_lex(a, b, a.len()).unwrap() == std::cmp::Ordering::Less;
            less != dominates_by_completion(a, b)
        })
        .map(|(a, b)| format!("{a} vs {b}"))
        .collect();
    outcome(counterexamples.is_empty(), format!("{} pairs, counterexamples {counterexamples:?}", pairs.len()))
}

fn approximation_soundness(cases: &[TinyCase]) -> Outcome {
    let mut failures = Vec::new();
    for case in cases {
        let m = case.inst.machine_count();
        let r = approximate_lex(&case.inst, &LexOptConfig::exact(m)).unwrap();
        let feasible = evaluate(&r.schedule, &case.inst).map(|e| e == r.evaluation).unwrap_or(false);
        let first = r.lex.makespan() == case.optimum.makespan();
        let not_better = r.lex.as_slice() >= case.optimum.as_slice();
        let calls = r.solver_calls <= m;
        if !(feasible && first && not_better && calls) {
            failures.push(format!("{}: {} calls {} (oracle {})", case.id, r.lex, r.solver_calls, case.optimum));
        }
    }
    outcome(failures.is_empty(), format!("{}/{} sound {failures:?}", cases.len() - failures.len(), cases.len()))
}

fn granularity_gap(cases: &[TinyCase]) -> Outcome {
    let mut failures = Vec::new();
    let mut max_gap = 0;
    for case in cases {
        let m = case.inst.machine_count();
        let coarse = LexOptConfig { granularity: 10, ..LexOptConfig::exact(m) };
        let r = optimize_lex_exact(&case.inst, &coarse).unwrap();
        let gap = r.lex.makespan() - case.optimum.makespan();
        max_gap = max_gap.max(gap);
        let exact_ok = case.exact.as_ref() == Some(&case.optimum);
        if gap >= 10 || !exact_ok {
            failures.push(format!("{}: g=10 gives {} vs {}", case.id, r.lex, case.optimum));
        }
    }
    outcome(
        failures.is_empty(),
        format!("max first-component gap {max_gap} over {} instances {failures:?}", cases.len()),
    )
}

fn heuristic_neutrality(cases: &[TinyCase]) -> Outcome {
    let mut changed = Vec::new();
    for case in cases {
        let m = case.inst.machine_count();
        let off = LexOptConfig { heuristics: false, ..LexOptConfig::exact(m) };
        let r = optimize_lex_exact(&case.inst, &off).unwrap();
        if Some(&r.lex) != case.exact.as_ref() {
            changed.push(case.id.clone());
        }
    }
    outcome(
        changed.is_empty(),
        format!("{} tuples unchanged with heuristics off, changed {changed:?}", cases.len() - changed.len()),
    )
}

fn heuristic_soft_check() -> Outcome {
    let mut wins = 0;
    let budget = SearchBudget::nodes(20_000);
    for seed in 0..20 {
        let spec =
            GenSpec::new(InstanceClass::Custom { machines: 5, min_jobs: 15, max_jobs: 15 }, Dedication::Low, seed);
        let (inst, _) = generate_with_info::<u64>(&spec).unwrap();
        let first =
            |h: bool| minimize_makespan_with(&inst, h, &budget, |_, _, _| {}).first_solution_node.unwrap_or(u64::MAX);
        if first(true) <= first(false) {
            wins += 1;
        }
    }
    outcome(wins * 100 >= 60 * 20, format!("heuristics reach a first incumbent no later on {wins}/20 seeds"))
}

fn rmax_oracle(inst: &Instance64) -> u64 {
    let (m, n) = (inst.machine_count(), inst.job_count());
    let mut total = Ratio::<u128>::from_integer(0);
    for j in 0..n {
        let mut a: u128 = 0;
        for &k in inst.cap(j) {
            a += inst.duration(j, k).unwrap() as u128;
        }
        for jp in (0..n).filter(|&jp| jp != j) {
            for &k in inst.cap(jp) {
                a += inst.setup(jp, j, k).unwrap_or(0) as u128;
            }
        }
        total += Ratio::new(a, inst.cap(j).len() as u128);
    }
    (total / Ratio::from_integer(m as u128)).to_integer() as u64
}

fn generator_conformance() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for class in InstanceClass::standard() {
        for seed in 0..100u64 {
            let dedication = if seed % 2 == 0 { Dedication::Low } else { Dedication::High };
            let (inst, info) = generate_with_info::<u64>(&GenSpec::new(class, dedication, seed)).unwrap();
            count += 1;
            let (m, n) = (inst.machine_count(), inst.job_count());
            let (lo, hi) = class.job_range();
            let mut ok = m == class.machines() && (lo..=hi).contains(&n);
            let r_max = rmax_oracle(&inst);
            ok &= info.r_max == r_max;
            for j in 0..n {
                for &k in inst.cap(j) {
                    ok &= (10..=500).contains(&inst.duration(j, k).unwrap());
                    ok &= inst.release(j, k).unwrap() <= r_max;
                    for &i in inst.eligible_jobs(k).iter().filter(|&&i| i != j) {
                        ok &= inst.setup(i, j, k).unwrap() <= 100;
                    }
                }
            }
            if dedication == Dedication::High {
                ok &= info.pool.len() == m.div_ceil(5);
                ok &= info.restricted_jobs.len() == (4 * n).div_ceil(5);
                ok &= info.restricted_jobs.iter().all(|&j| inst.cap(j).iter().all(|k| info.pool.contains(k)));
            }
            if !ok {
                failures.push(format!("{class:?} seed {seed}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("{}/{count} instances conform {failures:?}", count - failures.len()))
}

fn budget_policy() -> Outcome {
    let split = split_budget(&SearchBudget::time(Duration::from_secs(300)), 3, BudgetPolicy::GeometricHalf);
    let secs: Vec<u64> = split.iter().map(|b| b.time_limit.unwrap().as_secs()).collect();
    outcome(secs == [150, 75, 75], format!("300 s over 3 levels -> {secs:?}"))
}

fn io_criteria() -> Outcome {
    let mut round_trips = 0;
    for seed in 0..100u64 {
        let class = if seed < 50 { InstanceClass::M3 } else { InstanceClass::M5 };
        let dedication = if seed % 2 == 0 { Dedication::Low } else { Dedication::High };
        let (inst, _) = generate_with_info::<u64>(&GenSpec::new(class, dedication, seed)).unwrap();
        if parse_facts::<u64>(&emit_facts(&inst)).ok().as_ref() == Some(&inst) {
            round_trips += 1;
        }
    }

    let golden_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let golden_ok = [("two_jobs_lex.mzn", Objective::Lex), ("two_jobs_makespan.mzn", Objective::Makespan)].iter().all(
        |(file, objective)| {
            let expected = std::fs::read_to_string(format!("{golden_dir}/{file}")).unwrap_or_default();
            let inst = common::two_jobs();
            export_minizinc(&inst, *objective) == expected && export_minizinc(&inst, *objective) == expected
        },
    );

    let mut checker_ok = 0;
    for seed in 0..10u64 {
        let spec = GenSpec::new(
            InstanceClass::Custom { machines: 2 + (seed as usize % 2), min_jobs: 3, max_jobs: 4 },
            Dedication::Low,
            seed,
        );
        let (inst, _) = generate_with_info::<u64>(&spec).unwrap();
        let mut expected: BTreeSet<(Vec<usize>, Vec<usize>, Vec<u128>)> = BTreeSet::new();
        enumerate_schedules(&inst, DEFAULT_LEAF_CAP, |s, e: &Evaluation64| {
            let (a, p) = ModelPoint::encode(s);
            expected.insert((a, p, e.span.iter().map(|&x| x as u128).collect()));
        })
        .unwrap();
        let all_match = [Objective::Lex, Objective::Makespan].iter().all(|&objective| {
            let found: BTreeSet<_> = check_minizinc(&export_minizinc(&inst, objective))
                .unwrap()
                .into_iter()
                .map(|pt| (pt.a, pt.p, pt.span))
                .collect();
            found == expected
        });
        if all_match {
            checker_ok += 1;
        }
    }
    outcome(
        round_trips == 100 && golden_ok && checker_ok == 10,
        format!("facts round-trips {round_trips}/100; golden files stable: {golden_ok}; model feasible set equals oracle set on {checker_ok}/10"),
    )
}

fn curves(cases: &[TinyCase]) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut check = |spans: &[u64], id: &str| {
        let curve = completion_curve(&LexMakespan::from_spans(spans));
        let fr = curve.fractions();
        let distinct: Vec<u64> = spans.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let makespan = spans.iter().copied().max().unwrap_or(0);
        let ok = fr.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0)
            && fr.last() == Some(&(makespan, 1.0))
            && fr.iter().map(|p| p.0).collect::<Vec<_>>() == distinct;
        checked += 1;
        if !ok {
            bad.push(id.to_string());
        }
    };
    for case in cases {
        check(case.optimum.as_slice(), &case.id);
        enumerate_schedules(&case.inst, DEFAULT_LEAF_CAP, |_, e| check(&e.span, &case.id)).unwrap();
    }
    outcome(bad.is_empty(), format!("{checked} curves checked, failing {bad:?}"))
}

fn main() -> ExitCode {
    let mut cases: Vec<TinyCase> = common::tiny_suite()
        .into_iter()
        .map(|(id, inst)| {
            let optimum = oracle_lex_optimum(&inst, inst.machine_count()).unwrap().best_lex;
            TinyCase { id, inst, optimum, exact: None }
        })
        .collect();

    let results: Vec<(&str, bool, Outcome)> = vec![
        ("micro-instance", true, micro_instance()),
        ("oracle-equivalence", true, oracle_equivalence(&mut cases)),
        ("lex-order-vs-completion-dominance", true, completion_dominance(&cases)),
        ("approximation-soundness", true, approximation_soundness(&cases)),
        ("granularity-gap", true, granularity_gap(&cases)),
        ("heuristic-neutrality", true, heuristic_neutrality(&cases)),
        ("heuristic-first-incumbent (soft)", false, heuristic_soft_check()),
        ("generator-conformance", true, generator_conformance()),
        ("budget-policy", true, budget_policy()),
        ("io", true, io_criteria()),
        ("curves", true, curves(&cases)),
    ];

    let mut failed = false;
    for (name, gating, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", o.detail);
        failed |= *gating && !o.pass;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
