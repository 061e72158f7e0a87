//! Fact-style text format:
//!
//! ```text
//! machine(m1).
//! cap(m1,j1). cap(m1,j2).
//! job(j1). duration(j1,m1,5). release(j1,m1,0).
//! job(j2). duration(j2,m1,5). release(j2,m1,0).
//! setup(j1,j2,m1,4). setup(j2,j1,m1,2).
//! ```
//!
//! Several facts may share a line and `%` starts a comment. Missing setup
//! facts default to 0; a missing `horizon/1` falls back to the default
//! horizon. Schedules use one `sequence(M,J1,J2,...)` fact per machine.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::io::IoError;
use crate::model::{Instance, InstanceBuilder, Schedule};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Fact {
    line: usize,
    pred: String,
    args: Vec<String>,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<Fact>, IoError> {
    let mut facts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('%').next().unwrap_or("");
        let mut rest = content.trim_start();
        while !rest.is_empty() {
            let name_len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
            if name_len == 0 {
                return Err(IoError::parse(line, format!("expected a predicate name at '{rest}'")));
            }
            let pred = rest[..name_len].to_string();
            rest = rest[name_len..].trim_start();
            let Some(after) = rest.strip_prefix('(') else {
                return Err(IoError::parse(line, format!("expected '(' after {pred}")));
            };
            let Some(close) = after.find(')') else {
                return Err(IoError::parse(line, format!("unclosed argument list of {pred}")));
            };
            let args: Vec<String> = after[..close].split(',').map(|a| a.trim().to_string()).collect();
            if args.iter().any(|a| a.is_empty() || !a.chars().all(is_ident_char)) {
                return Err(IoError::parse(line, format!("malformed arguments of {pred}")));
            }
            rest = after[close + 1..].trim_start();
            let Some(after_dot) = rest.strip_prefix('.') else {
                return Err(IoError::parse(line, format!("missing '.' after {pred}")));
            };
            rest = after_dot.trim_start();
            facts.push(Fact { line, pred, args });
        }
    }
    Ok(facts)
}

fn expect_arity(f: &Fact, arity: usize) -> Result<(), IoError> {
    if f.args.len() == arity {
        Ok(())
    } else {
        Err(IoError::parse(f.line, format!("{} expects {arity} arguments, found {}", f.pred, f.args.len())))
    }
}

struct Names {
    index: HashMap<String, usize>,
    names: Vec<String>,
    lines: Vec<usize>,
}

impl Names {
    fn new() -> Self {
        Names { index: HashMap::new(), names: Vec::new(), lines: Vec::new() }
    }

    fn declare(&mut self, name: &str, line: usize) {
        if !self.index.contains_key(name) {
            self.index.insert(name.to_string(), self.names.len());
            self.names.push(name.to_string());
            self.lines.push(line);
        }
    }

    fn get(&self, name: &str, kind: &str, line: usize) -> Result<usize, IoError> {
        self.index.get(name).copied().ok_or_else(|| IoError::parse(line, format!("undeclared {kind} {name}")))
    }
}

fn number<T: Time>(s: &str, line: usize) -> Result<T, IoError> {
    s.parse::<T>().map_err(|_| IoError::parse(line, format!("invalid number {s}")))
}

/// Inserts `value` under `key`, rejecting a different value for the same key.
fn record<K: Ord, V: PartialEq + Copy>(
    map: &mut BTreeMap<K, (V, usize)>,
    key: K,
    value: V,
    line: usize,
    what: impl FnOnce() -> String,
) -> Result<(), IoError> {
    match map.get(&key) {
        Some(&(old, _)) if old != value => Err(IoError::parse(line, format!("conflicting {}", what()))),
        Some(_) => Ok(()),
        None => {
            map.insert(key, (value, line));
            Ok(())
        }
    }
}

/// Parses an instance. Ids follow declaration order.
pub fn parse_facts<T: Time>(text: &str) -> Result<Instance<T>, IoError> {
    let facts = tokenize(text)?;
    let mut machines = Names::new();
    let mut jobs = Names::new();
    for f in &facts {
        match f.pred.as_str() {
            "machine" => {
                expect_arity(f, 1)?;
                machines.declare(&f.args[0], f.line);
            }
            "job" => {
                expect_arity(f, 1)?;
                jobs.declare(&f.args[0], f.line);
            }
            _ => {}
        }
    }

    let mut cap: BTreeMap<(usize, usize), ((), usize)> = BTreeMap::new();
    let mut duration: BTreeMap<(usize, usize), (T, usize)> = BTreeMap::new();
    let mut release: BTreeMap<(usize, usize), (T, usize)> = BTreeMap::new();
    let mut setup: BTreeMap<(usize, usize, usize), (T, usize)> = BTreeMap::new();
    let mut horizon: Option<(T, usize)> = None;
    for f in &facts {
        let line = f.line;
        match f.pred.as_str() {
            "machine" | "job" => {}
            "cap" => {
                expect_arity(f, 2)?;
                let k = machines.get(&f.args[0], "machine", line)?;
                let j = jobs.get(&f.args[1], "job", line)?;
                cap.entry((j, k)).or_insert(((), line));
            }
            "duration" | "release" => {
                expect_arity(f, 3)?;
                let j = jobs.get(&f.args[0], "job", line)?;
                let k = machines.get(&f.args[1], "machine", line)?;
                let v = number::<T>(&f.args[2], line)?;
                let map = if f.pred == "duration" { &mut duration } else { &mut release };
                record(map, (j, k), v, line, || format!("{} of {} on {}", f.pred, f.args[0], f.args[1]))?;
            }
            "setup" => {
                expect_arity(f, 4)?;
                let i = jobs.get(&f.args[0], "job", line)?;
                let j = jobs.get(&f.args[1], "job", line)?;
                let k = machines.get(&f.args[2], "machine", line)?;
                let v = number::<T>(&f.args[3], line)?;
                record(&mut setup, (i, j, k), v, line, || {
                    format!("setup {}->{} on {}", f.args[0], f.args[1], f.args[2])
                })?;
            }
            "horizon" => {
                expect_arity(f, 1)?;
                let v = number::<T>(&f.args[0], line)?;
                match horizon {
                    Some((old, _)) if old != v => return Err(IoError::parse(line, "conflicting horizon")),
                    _ => horizon = Some((v, line)),
                }
            }
            other => return Err(IoError::parse(line, format!("unknown predicate {other}"))),
        }
    }

    for (&(j, k), &(_, line)) in duration.iter().chain(release.iter()) {
        if !cap.contains_key(&(j, k)) {
            return Err(IoError::parse(line, format!("{} is not capable of {}", machines.names[k], jobs.names[j])));
        }
    }
    for (&(i, j, k), &(_, line)) in &setup {
        if i == j || !cap.contains_key(&(i, k)) || !cap.contains_key(&(j, k)) {
            return Err(IoError::parse(line, "setup requires two distinct jobs capable on the machine"));
        }
    }
    for (j, &line) in jobs.lines.iter().enumerate() {
        if !cap.keys().any(|&(cj, _)| cj == j) {
            return Err(IoError::parse(line, format!("job {} has no cap fact", jobs.names[j])));
        }
    }

    let mut b = InstanceBuilder::named(machines.names.clone(), jobs.names.clone());
    for (&(j, k), &(_, line)) in &cap {
        let d = duration
            .get(&(j, k))
            .ok_or_else(|| {
                IoError::parse(line, format!("missing duration of {} on {}", jobs.names[j], machines.names[k]))
            })?
            .0;
        let r = release
            .get(&(j, k))
            .ok_or_else(|| {
                IoError::parse(line, format!("missing release of {} on {}", jobs.names[j], machines.names[k]))
            })?
            .0;
        b = b.eligible(j, k, d, r);
    }
    for (&(i, j, k), &(v, _)) in &setup {
        b = b.setup(i, j, k, v);
    }
    if let Some((h, _)) = horizon {
        b = b.horizon(h);
    }
    Ok(b.build()?)
}

/// Emits every fact explicitly, including zero setups and the horizon, so
/// that `parse_facts(emit_facts(x)) == x`.
pub fn emit_facts<T: Time>(inst: &Instance<T>) -> String {
    let mut out = String::new();
    let (m, n) = (inst.machine_count(), inst.job_count());
    for k in 0..m {
        writeln!(out, "machine({}).", inst.machine_name(k)).unwrap();
    }
    for k in 0..m {
        let caps: Vec<String> = inst
            .eligible_jobs(k)
            .iter()
            .map(|&j| format!("cap({},{}).", inst.machine_name(k), inst.job_name(j)))
            .collect();
        if !caps.is_empty() {
            writeln!(out, "{}", caps.join(" ")).unwrap();
        }
    }
    for j in 0..n {
        let jn = inst.job_name(j);
        write!(out, "job({jn}).").unwrap();
        for &k in inst.cap(j) {
            let mn = inst.machine_name(k);
            write!(out, " duration({jn},{mn},{}). release({jn},{mn},{}).", inst.d(j, k), inst.r(j, k)).unwrap();
        }
        out.push('\n');
    }
    for k in 0..m {
        let jobs = inst.eligible_jobs(k);
        let mut setups = Vec::new();
        for &i in jobs {
            for &j in jobs {
                if i != j {
                    setups.push(format!(
                        "setup({},{},{},{}).",
                        inst.job_name(i),
                        inst.job_name(j),
                        inst.machine_name(k),
                        inst.s(i, j, k)
                    ));
                }
            }
        }
        if !setups.is_empty() {
            writeln!(out, "{}", setups.join(" ")).unwrap();
        }
    }
    if n > 0 || inst.horizon() != T::zero() {
        writeln!(out, "horizon({}).", inst.horizon()).unwrap();
    }
    out
}

/// One `sequence(M,J1,...)` fact per machine, in machine order.
pub fn emit_schedule_facts<T: Time>(schedule: &Schedule, inst: &Instance<T>) -> String {
    let mut out = String::new();
    for (k, seq) in schedule.sequences().iter().enumerate() {
        let mut args = vec![inst.machine_name(k).to_string()];
        args.extend(seq.iter().map(|&j| inst.job_name(j).to_string()));
        writeln!(out, "sequence({}).", args.join(",")).unwrap();
    }
    out
}

/// Parses `sequence/N` facts against `inst`. Machines without a fact stay empty.
pub fn parse_schedule_facts<T: Time>(text: &str, inst: &Instance<T>) -> Result<Schedule, IoError> {
    let mut sequences: Vec<Option<Vec<usize>>> = vec![None; inst.machine_count()];
    for f in tokenize(text)? {
        if f.pred != "sequence" {
            return Err(IoError::parse(f.line, format!("unknown predicate {}", f.pred)));
        }
        let k = inst
            .machine_index(&f.args[0])
            .ok_or_else(|| IoError::parse(f.line, format!("undeclared machine {}", f.args[0])))?;
        if sequences[k].is_some() {
            return Err(IoError::parse(f.line, format!("duplicate sequence for {}", f.args[0])));
        }
        let seq = f.args[1..]
            .iter()
            .map(|a| inst.job_index(a).ok_or_else(|| IoError::parse(f.line, format!("undeclared job {a}"))))
            .collect::<Result<Vec<_>, _>>()?;
        sequences[k] = Some(seq);
    }
    let schedule =
        Schedule::from_sequences(inst.job_count(), sequences.into_iter().map(Option::unwrap_or_default).collect())?;
    schedule.validate(inst)?;
    Ok(schedule)
}
