//! Depth-first branch-and-bound over assignments, then per-machine sequences.
//!
//! For a fixed assignment the machines are independent, and every level
//! bound (and the makespan cap) only asks for spans to be small enough.
//! So a complete assignment is feasible iff the vector of per-machine
//! minimum spans is. Per-machine sequencing results are cached by
//! `(machine, job set)` so that revisiting the same load never re-sequences.

use std::collections::HashMap;
use std::time::Instant;

use crate::model::{evaluate, Evaluation, Instance, Schedule};
use crate::search::bound::machine_lb;
use crate::search::heuristics::BranchOrder;
use crate::search::jobset::JobSet;
use crate::search::{LevelBound, SearchBudget};
use crate::time::Time;

pub(crate) struct Clock {
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    pub nodes: u64,
}

impl Clock {
    pub fn start(budget: &SearchBudget) -> Self {
        Clock { deadline: budget.time_limit.map(|d| Instant::now() + d), node_limit: budget.node_limit, nodes: 0 }
    }

    /// Registers one node expansion; false once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.node_limit.is_some_and(|l| self.nodes >= l) {
            return false;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return false;
        }
        self.nodes += 1;
        true
    }
}

/// Best known sequence for a machine load, with a proven lower bound on
/// the minimum span (`lower == best` means optimal).
#[derive(Debug, Clone)]
struct SeqEntry<T> {
    best: T,
    seq: Vec<usize>,
    lower: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    /// Reached a span that is good enough.
    Enough,
    /// Dive mode: first complete sequence found.
    Dived,
    Abort,
}

pub(crate) struct SearchReport<T> {
    pub best: Option<(Schedule, Evaluation<T>)>,
    pub aborted: bool,
    pub nodes: u64,
    pub first_solution_node: Option<u64>,
}

pub(crate) struct Engine<'a, T: Time, F> {
    inst: &'a Instance<T>,
    order: BranchOrder<T>,
    bounds: Vec<LevelBound<T>>,
    optimize: bool,
    /// Optimization: every span must be strictly below this.
    cap: Option<T>,
    root_lb: T,
    clock: Clock,
    aborted: bool,
    done: bool,
    sets: Vec<Vec<usize>>,
    assigned: Vec<Option<usize>>,
    min_release: Vec<T>,
    sum_d: Vec<T>,
    lbs: Vec<T>,
    cache: HashMap<(usize, JobSet), SeqEntry<T>>,
    best: Option<(Schedule, Evaluation<T>)>,
    first_solution_node: Option<u64>,
    on_solution: F,
}

impl<'a, T: Time, F: FnMut(&Schedule, &Evaluation<T>, u64)> Engine<'a, T, F> {
    pub fn new(
        inst: &'a Instance<T>,
        bounds: Vec<LevelBound<T>>,
        heuristics: bool,
        optimize: bool,
        budget: &SearchBudget,
        on_solution: F,
    ) -> Self {
        let m = inst.machine_count();
        let n = inst.job_count();
        let root_lb = (0..n)
            .map(|j| inst.cap(j).iter().map(|&k| inst.r(j, k) + inst.d(j, k)).min().unwrap_or_else(T::zero))
            .max()
            .unwrap_or_else(T::zero);
        Engine {
            inst,
            order: BranchOrder::new(inst, heuristics),
            bounds,
            optimize,
            cap: None,
            root_lb,
            clock: Clock::start(budget),
            aborted: false,
            done: false,
            sets: vec![Vec::new(); m],
            assigned: vec![None; n],
            min_release: vec![T::max_value(); m],
            sum_d: vec![T::zero(); m],
            lbs: vec![T::zero(); m],
            cache: HashMap::new(),
            best: None,
            first_solution_node: None,
            on_solution,
        }
    }

    pub fn run(mut self) -> SearchReport<T> {
        self.assign(0);
        SearchReport {
            best: self.best,
            aborted: self.aborted,
            nodes: self.clock.nodes,
            first_solution_node: self.first_solution_node,
        }
    }

    fn stopped(&self) -> bool {
        self.aborted || self.done
    }

    /// Whether a per-machine vector of spans (or span lower bounds)
    /// satisfies every level bound and the optimization cap.
    fn vector_ok(&self, v: &[T]) -> bool {
        let m = v.len();
        if let Some(c) = self.cap {
            if v.iter().any(|&s| s >= c) {
                return false;
            }
        }
        self.bounds.iter().all(|b| v.iter().filter(|&&s| b.admits(s)).count() >= m + 1 - b.level)
    }

    /// Strict threshold every machine must meet (makespan cap and level-1 bounds).
    fn all_machine_cut(&self) -> Option<T> {
        let mut cut = self.cap;
        for b in self.bounds.iter().filter(|b| b.level == 1) {
            let c = if b.strict { b.bound } else { b.bound + T::one() };
            cut = Some(cut.map_or(c, |x| x.min(c)));
        }
        cut
    }

    /// Every unassigned job must still fit somewhere under the all-machine cut.
    fn unassigned_fit(&self) -> bool {
        let Some(cut) = self.all_machine_cut() else { return true };
        let inst = self.inst;
        (0..inst.job_count()).filter(|&j| self.assigned[j].is_none()).all(|j| {
            inst.cap(j).iter().any(|&k| {
                let (r, d) = (inst.r(j, k), inst.d(j, k));
                let start = if self.sets[k].is_empty() { r } else { self.min_release[k].min(r) };
                let lb = (start + self.sum_d[k] + d).max(self.lbs[k]);
                lb < cut
            })
        })
    }

    fn assign(&mut self, depth: usize) {
        if !self.clock.tick() {
            self.aborted = true;
            return;
        }
        if depth == self.order.jobs.len() {
            self.leaf();
            return;
        }
        let j = self.order.jobs[depth];
        for idx in 0..self.order.machines[j].len() {
            let k = self.order.machines[j][idx];
            let (old_lb, old_rel, old_sum) = (self.lbs[k], self.min_release[k], self.sum_d[k]);
            self.sets[k].push(j);
            self.assigned[j] = Some(k);
            self.min_release[k] = old_rel.min(self.inst.r(j, k));
            self.sum_d[k] = old_sum + self.inst.d(j, k);
            self.lbs[k] = machine_lb(self.inst, k, None, &self.sets[k]);
            if self.vector_ok(&self.lbs) && self.unassigned_fit() {
                self.assign(depth + 1);
            }
            self.sets[k].pop();
            self.assigned[j] = None;
            self.lbs[k] = old_lb;
            self.min_release[k] = old_rel;
            self.sum_d[k] = old_sum;
            if self.stopped() {
                return;
            }
        }
    }

    fn key(&self, k: usize) -> (usize, JobSet) {
        (k, JobSet::from_indices(self.inst.job_count(), self.sets[k].iter().copied()))
    }

    #[allow(clippy::needless_range_loop)]
    fn leaf(&mut self) {
        let m = self.inst.machine_count();
        let mut spans = vec![T::zero(); m];
        // Pass 1: a first sequence for every machine.
        for k in 0..m {
            let key = self.key(k);
            if !self.cache.contains_key(&key) {
                let jobs = self.sets[k].clone();
                let lower = self.lbs[k];
                let mut entry = None;
                let flow = self.sequence(k, &jobs, &mut entry, lower, None, None, true);
                if flow == Flow::Abort && entry.is_none() {
                    self.aborted = true;
                    return;
                }
                let (best, seq) = entry.expect("dive produced a sequence");
                self.cache.insert(key.clone(), SeqEntry { best, seq, lower });
                if flow == Flow::Abort {
                    self.aborted = true;
                }
            }
            spans[k] = self.cache[&key].best;
        }
        if self.vector_ok(&spans) {
            self.accept();
            if !self.optimize || self.stopped() {
                return;
            }
        }
        if self.aborted {
            return;
        }
        if self.optimize {
            self.improve_makespan(spans);
        } else {
            self.improve_levels(spans);
        }
    }

    fn improve_makespan(&mut self, mut spans: Vec<T>) {
        let leaf_lb = self.lbs.iter().copied().max().unwrap_or_else(T::zero);
        loop {
            let (kmax, &top) =
                spans.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("at least one machine");
            if top <= leaf_lb {
                return;
            }
            let key = self.key(kmax);
            let entry = &self.cache[&key];
            if entry.lower == entry.best || self.cap.is_some_and(|c| entry.lower >= c) {
                return;
            }
            // Below the next distinct span value another machine becomes critical.
            let next_lower = spans.iter().copied().filter(|&s| s < top).max().unwrap_or_else(T::zero);
            let good = leaf_lb.max(next_lower);
            let before = (entry.best, entry.lower);
            self.refine(kmax, self.cap, Some(good));
            if self.aborted {
                return;
            }
            let after = &self.cache[&key];
            if (after.best, after.lower) == before {
                return;
            }
            spans[kmax] = after.best;
            if self.vector_ok(&spans) {
                self.accept();
                if self.stopped() {
                    return;
                }
            }
        }
    }

    fn improve_levels(&mut self, mut spans: Vec<T>) {
        // Spans at or above `cut` satisfy no bound; spans at or below
        // `good` satisfy all of them.
        let cut = self.bounds.iter().map(|b| if b.strict { b.bound } else { b.bound + T::one() }).max();
        let good = self
            .bounds
            .iter()
            .map(|b| if b.strict { b.bound.checked_sub(&T::one()) } else { Some(b.bound) })
            .min()
            .flatten();
        if self.bounds.is_empty() {
            return;
        }
        let mut order: Vec<usize> = (0..spans.len()).collect();
        order.sort_by_key(|&k| (std::cmp::Reverse(spans[k]), k));
        for k in order {
            if good.is_some_and(|g| spans[k] <= g) {
                continue;
            }
            self.refine(k, cut, good);
            if self.aborted {
                return;
            }
            let key = self.key(k);
            spans[k] = self.cache[&key].best;
            if self.vector_ok(&spans) {
                self.accept();
                return;
            }
        }
    }

    /// Improves the cached sequence of machine `k`, looking only for spans
    /// strictly below `cut` and stopping once at or below `good`.
    fn refine(&mut self, k: usize, cut: Option<T>, good: Option<T>) {
        let key = self.key(k);
        let SeqEntry { best, seq, lower } = self.cache[&key].clone();
        if lower == best || cut.is_some_and(|c| lower >= c) || good.is_some_and(|g| best <= g) {
            return;
        }
        let jobs = self.sets[k].clone();
        let mut found = Some((best, seq));
        let flow = self.sequence(k, &jobs, &mut found, lower, cut, good, false);
        let (new_best, new_seq) = found.expect("seeded");
        let new_lower = match flow {
            Flow::Continue => match cut {
                Some(c) if new_best >= c => lower.max(c),
                _ => new_best,
            },
            _ => lower,
        };
        self.cache.insert(key, SeqEntry { best: new_best, seq: new_seq, lower: new_lower.min(new_best) });
        if flow == Flow::Abort {
            self.aborted = true;
        }
    }

    /// Branch-and-bound over the processing order of `jobs` on machine `k`.
    #[allow(clippy::too_many_arguments)]
    fn sequence(
        &mut self,
        k: usize,
        jobs: &[usize],
        best: &mut Option<(T, Vec<usize>)>,
        lower: T,
        cut: Option<T>,
        good: Option<T>,
        dive: bool,
    ) -> Flow {
        let mut run = SeqRun {
            inst: self.inst,
            order: &self.order,
            clock: &mut self.clock,
            k,
            jobs,
            best,
            lower,
            cut,
            good,
            dive,
            memo: HashMap::new(),
            prefix: Vec::with_capacity(jobs.len()),
            placed: JobSet::with_capacity(jobs.len()),
        };
        run.dfs(None, T::zero())
    }

    fn accept(&mut self) {
        let sequences: Vec<Vec<usize>> =
            (0..self.inst.machine_count()).map(|k| self.cache[&self.key(k)].seq.clone()).collect();
        let schedule =
            Schedule::from_sequences(self.inst.job_count(), sequences).expect("engine builds valid schedules");
        let evaluation = evaluate(&schedule, self.inst).expect("engine builds valid schedules");
        debug_assert!(self.vector_ok(&evaluation.span));
        if self.first_solution_node.is_none() {
            self.first_solution_node = Some(self.clock.nodes);
        }
        (self.on_solution)(&schedule, &evaluation, self.clock.nodes);
        if self.optimize {
            self.cap = Some(evaluation.makespan);
            if evaluation.makespan <= self.root_lb {
                self.done = true;
            }
        } else {
            self.done = true;
        }
        self.best = Some((schedule, evaluation));
    }
}

struct SeqRun<'r, T: Time> {
    inst: &'r Instance<T>,
    order: &'r BranchOrder<T>,
    clock: &'r mut Clock,
    k: usize,
    jobs: &'r [usize],
    best: &'r mut Option<(T, Vec<usize>)>,
    lower: T,
    cut: Option<T>,
    good: Option<T>,
    dive: bool,
    /// Earliest completion seen per (placed set, last job).
    memo: HashMap<(JobSet, usize), T>,
    prefix: Vec<usize>,
    placed: JobSet,
}

impl<T: Time> SeqRun<'_, T> {
    fn target(&self) -> Option<T> {
        match (self.best.as_ref().map(|b| b.0), self.cut) {
            (Some(b), Some(c)) => Some(b.min(c)),
            (b, c) => b.or(c),
        }
    }

    fn dfs(&mut self, last: Option<(usize, usize)>, t: T) -> Flow {
        if !self.clock.tick() {
            return Flow::Abort;
        }
        let q = self.jobs.len();
        if self.prefix.len() == q {
            if self.best.as_ref().is_none_or(|b| t < b.0) {
                let seq = self.prefix.iter().map(|&i| self.jobs[i]).collect();
                *self.best = Some((t, seq));
            }
            if self.dive {
                return Flow::Dived;
            }
            if self.good.is_some_and(|g| t <= g) || t <= self.lower {
                return Flow::Enough;
            }
            return Flow::Continue;
        }
        let (inst, k) = (self.inst, self.k);
        let mut cands: Vec<usize> = (0..q).filter(|&i| !self.placed.contains(i)).map(|i| self.jobs[i]).collect();
        self.order.order_successors(inst, k, last.map(|l| l.1), &mut cands);
        for c in cands {
            let ci = self.jobs.iter().position(|&x| x == c).expect("candidate from jobs");
            let tc = match last {
                None => inst.r(c, k) + inst.d(c, k),
                Some((_, l)) => inst.r(c, k).max(t) + inst.s(l, c, k) + inst.d(c, k),
            };
            if !self.dive {
                if let Some(tg) = self.target() {
                    let rest: Vec<usize> =
                        (0..q).filter(|&i| i != ci && !self.placed.contains(i)).map(|i| self.jobs[i]).collect();
                    if machine_lb(inst, k, Some((c, tc)), &rest) >= tg {
                        continue;
                    }
                }
            }
            self.placed.insert(ci);
            let memo_key = (self.placed.clone(), ci);
            let dominated = self.memo.get(&memo_key).is_some_and(|&seen| seen <= tc);
            if !dominated {
                self.memo.insert(memo_key, tc);
                self.prefix.push(ci);
                let flow = self.dfs(Some((ci, c)), tc);
                self.prefix.pop();
                if flow != Flow::Continue {
                    self.placed.remove(ci);
                    return flow;
                }
            }
            self.placed.remove(ci);
        }
        Flow::Continue
    }
}
