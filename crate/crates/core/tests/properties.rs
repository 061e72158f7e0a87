mod common;

use std::cmp::Ordering;
use std::time::Duration;

use num_rational::Ratio;
use proptest::prelude::*;

use lexsched::bench::{average_curves, completion_curve};
use lexsched::instgen::{compute_rmax, generate, Dedication, Draft};
use lexsched::io::{emit_facts, from_structured, parse_facts, to_structured};
use lexsched::lexopt::{approximate_lex, optimize_lex_exact, split_budget, BudgetPolicy, LexOptConfig};
use lexsched::model::{compare_lex, dominates_by_completion, evaluate, LexMakespan};
use lexsched::oracle::{enumerate_schedules, oracle_lex_optimum, DEFAULT_LEAF_CAP};
use lexsched::search::{lower_bound, minimize_makespan_with, PartialSchedule, SearchBudget};
use lexsched::{Instance64, InstanceBuilder64, Schedule};

/// Instances with small values so that ties are common.
fn small_instance(max_m: usize, max_n: usize) -> impl Strategy<Value = Instance64> {
    (1..=max_m, 1..=max_n)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                prop::collection::vec(1u32..(1 << m), n),
                prop::collection::vec((1u64..=6, 0u64..=5), n * m),
                prop::collection::vec(0u64..=4, m * n * n),
            )
        })
        .prop_map(|(m, n, masks, dr, setups)| {
            let mut b = InstanceBuilder64::new(m, n);
            for (j, mask) in masks.iter().enumerate() {
                for k in (0..m).filter(|k| mask & (1 << k) != 0) {
                    let (d, r) = dr[j * m + k];
                    b = b.eligible(j, k, d, r);
                }
            }
            for k in 0..m {
                for i in 0..n {
                    for j in 0..n {
                        if i != j && masks[i] & (1 << k) != 0 && masks[j] & (1 << k) != 0 {
                            b = b.setup(i, j, k, setups[(k * n + i) * n + j]);
                        }
                    }
                }
            }
            b.build().unwrap()
        })
}

fn spans_pair() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (1usize..=6).prop_flat_map(|m| (prop::collection::vec(0u64..=8, m), prop::collection::vec(0u64..=8, m)))
}

/// A random schedule of `inst`, driven by `picks`.
fn pick_schedule(inst: &Instance64, picks: &[usize]) -> Schedule {
    let mut seqs = vec![Vec::new(); inst.machine_count()];
    for j in 0..inst.job_count() {
        let cap = inst.cap(j);
        let k = cap[picks[j] % cap.len()];
        let pos = picks[j + inst.job_count()] % (seqs[k].len() + 1);
        seqs[k].insert(pos, j);
    }
    Schedule::from_sequences(inst.job_count(), seqs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lex_less_iff_completion_dominance((a, b) in spans_pair()) {
        let (la, lb) = (LexMakespan::from_spans(&a), LexMakespan::from_spans(&b));
        let less = compare_lex(&la, &lb, la.len()).unwrap() == Ordering::Less;
        prop_assert_eq!(less, dominates_by_completion(&la, &lb));
    }

    #[test]
    fn lex_tuple_is_sorted_permutation(mut spans in prop::collection::vec(0u64..100, 1..8), rot in 0usize..8) {
        let lex = LexMakespan::from_spans(&spans);
        prop_assert!(lex.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let mut sorted = spans.clone();
        sorted.sort_unstable_by(|x, y| y.cmp(x));
        prop_assert_eq!(lex.as_slice(), &sorted[..]);
        let len = spans.len();
        spans.rotate_left(rot % len);
        prop_assert_eq!(LexMakespan::from_spans(&spans), lex);
    }

    #[test]
    fn lower_bound_is_admissible(
        inst in small_instance(3, 4),
        picks in prop::collection::vec(0usize..24, 8),
        keep in prop::collection::vec(any::<bool>(), 4),
        prefix in prop::collection::vec(0usize..5, 3),
    ) {
        let full = pick_schedule(&inst, &picks);
        let (m, n) = (inst.machine_count(), inst.job_count());
        let mut partial = PartialSchedule::empty(m, n);
        for (k, &cut) in prefix.iter().enumerate().take(m) {
            let seq = full.sequence(k);
            let len = cut % (seq.len() + 1);
            partial.prefixes[k] = seq[..len].to_vec();
            for &j in &seq[..len] {
                partial.assignment[j] = Some(k);
            }
        }
        for (j, _) in keep.iter().enumerate().take(n).filter(|(_, &kept)| kept) {
            partial.assignment[j] = Some(full.assignment()[j]);
        }
        let lb = lower_bound(&partial, &inst).unwrap();
        let mut best = u64::MAX;
        enumerate_schedules(&inst, DEFAULT_LEAF_CAP, |s, e| {
            let consistent = (0..n).all(|j| partial.assignment[j].is_none_or(|k| s.assignment()[j] == k))
                && (0..m).all(|k| s.sequence(k).starts_with(&partial.prefixes[k]));
            if consistent {
                best = best.min(e.makespan);
            }
        }).unwrap();
        prop_assert!(lb <= best, "bound {} exceeds best completion {}", lb, best);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_matches_oracle_and_ignores_heuristics(inst in small_instance(3, 5)) {
        let m = inst.machine_count();
        let truth = oracle_lex_optimum(&inst, m).unwrap().best_lex;
        let on = optimize_lex_exact(&inst, &LexOptConfig::exact(m)).unwrap();
        let off = optimize_lex_exact(&inst, &LexOptConfig { heuristics: false, ..LexOptConfig::exact(m) }).unwrap();
        prop_assert_eq!(&on.lex, &truth);
        prop_assert_eq!(&off.lex, &truth);
        prop_assert_eq!(evaluate(&on.schedule, &inst).unwrap(), on.evaluation);
    }

    #[test]
    fn approximation_never_beats_oracle(inst in small_instance(3, 5)) {
        let m = inst.machine_count();
        let truth = oracle_lex_optimum(&inst, m).unwrap().best_lex;
        let r = approximate_lex(&inst, &LexOptConfig::exact(m)).unwrap();
        prop_assert_eq!(r.lex.makespan(), truth.makespan());
        prop_assert!(r.lex.as_slice() >= truth.as_slice());
        prop_assert!(r.solver_calls <= m);
    }

    #[test]
    fn prefix_levels_match_oracle(inst in small_instance(3, 5), l in 1usize..=3) {
        let l = l.min(inst.machine_count());
        let truth = oracle_lex_optimum(&inst, l).unwrap().best_lex;
        let r = optimize_lex_exact(&inst, &LexOptConfig::exact(l)).unwrap();
        prop_assert_eq!(&r.lex.as_slice()[..l], &truth.as_slice()[..l]);
    }

    #[test]
    fn incumbents_improve_strictly(inst in small_instance(3, 6), nodes in 1u64..400, h in any::<bool>()) {
        let mut seen = Vec::new();
        let out = minimize_makespan_with(&inst, h, &SearchBudget::nodes(nodes), |s, e, _| {
            assert_eq!(evaluate(s, &inst).unwrap(), *e);
            seen.push(e.makespan);
        });
        prop_assert!(seen.windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(seen.last().copied(), out.evaluation.map(|e| e.makespan));
    }

    #[test]
    fn granularity_gap_below_grid(inst in small_instance(3, 5), g in 1u64..=6) {
        let m = inst.machine_count();
        let truth = oracle_lex_optimum(&inst, m).unwrap().best_lex;
        let r = optimize_lex_exact(&inst, &LexOptConfig { granularity: g, ..LexOptConfig::exact(m) }).unwrap();
        prop_assert!(r.lex.makespan() - truth.makespan() < g);
    }

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>(), m in 2usize..=3, high in any::<bool>()) {
        let dedication = if high { Dedication::High } else { Dedication::Low };
        let inst: Instance64 = generate(&common::tiny_spec(m, dedication, seed)).unwrap();
        prop_assert_eq!(&parse_facts::<u64>(&emit_facts(&inst)).unwrap(), &inst);
        prop_assert_eq!(&from_structured::<u64>(&to_structured(&inst, None)).unwrap().0, &inst);
    }

    #[test]
    fn small_instances_round_trip(inst in small_instance(3, 5)) {
        prop_assert_eq!(&parse_facts::<u64>(&emit_facts(&inst)).unwrap(), &inst);
    }

    #[test]
    fn rmax_matches_rational_sum(inst in small_instance(3, 5)) {
        let draft = Draft::from_instance(&inst);
        let (m, n) = (inst.machine_count(), inst.job_count());
        let mut total = Ratio::<u128>::from_integer(0);
        for j in 0..n {
            let mut a: u128 = inst.cap(j).iter().map(|&k| inst.duration(j, k).unwrap() as u128).sum();
            for jp in (0..n).filter(|&jp| jp != j) {
                a += inst.cap(jp).iter().map(|&k| inst.setup(jp, j, k).unwrap_or(0) as u128).sum::<u128>();
            }
            total += Ratio::new(a, inst.cap(j).len() as u128);
        }
        prop_assert_eq!(compute_rmax(&draft) as u128, (total / Ratio::from_integer(m as u128)).to_integer());
    }

    #[test]
    fn curves_are_monotone_and_end_at_one(spans in prop::collection::vec(0u64..50, 1..8)) {
        let curve = completion_curve(&LexMakespan::from_spans(&spans));
        let fr = curve.fractions();
        prop_assert!(fr.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        prop_assert_eq!(fr.last().copied(), Some((*spans.iter().max().unwrap(), 1.0)));
    }

    #[test]
    fn averaged_curve_is_monotone(set in prop::collection::vec(prop::collection::vec(0u64..30, 3), 1..6)) {
        let curves: Vec<_> = set.iter().map(|s| completion_curve(&LexMakespan::from_spans(s))).collect();
        let avg = average_curves(&curves);
        prop_assert!(avg.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-12));
        prop_assert!((avg.last().unwrap().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_split_sums_to_total(secs in 0u64..10_000, nodes in 0u64..100_000, l in 1usize..8, uniform in any::<bool>()) {
        let policy = if uniform { BudgetPolicy::Uniform } else { BudgetPolicy::GeometricHalf };
        let total = SearchBudget { time_limit: Some(Duration::from_millis(secs)), node_limit: Some(nodes) };
        let parts = split_budget(&total, l, policy);
        prop_assert_eq!(parts.len(), l);
        prop_assert_eq!(parts.iter().map(|p| p.time_limit.unwrap()).sum::<Duration>(), total.time_limit.unwrap());
        prop_assert_eq!(parts.iter().map(|p| p.node_limit.unwrap()).sum::<u64>(), nodes);
    }
}
