//! Interprets an emitted MiniZinc model over its full (tiny) domains.
//!
//! The data section is read back from the model text; `a` and `p` are
//! enumerated, `c` is taken as the least solution of the timing constraints,
//! and every constraint is checked directly.

use crate::io::IoError;
use crate::model::Schedule;

/// Refusal threshold on `m^n · (n+1)^n`.
const DOMAIN_CAP: u128 = 20_000_000;

/// A feasible point in the model's own encoding: `a` is 1-based, `p` is 0
/// for a first job and the 1-based predecessor otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelPoint {
    pub a: Vec<usize>,
    pub p: Vec<usize>,
    pub c: Vec<u128>,
    pub span: Vec<u128>,
}

impl ModelPoint {
    /// `(a, p)` of a schedule in the model's encoding.
    pub fn encode(schedule: &Schedule) -> (Vec<usize>, Vec<usize>) {
        let n = schedule.assignment().len();
        let a = schedule.assignment().iter().map(|k| k + 1).collect();
        let mut p = vec![0; n];
        for seq in schedule.sequences() {
            for w in seq.windows(2) {
                p[w[1]] = w[0] + 1;
            }
        }
        (a, p)
    }

    pub fn makespan(&self) -> u128 {
        self.span.iter().copied().max().unwrap_or(0)
    }
}

struct Data {
    n: usize,
    m: usize,
    h: u128,
    cap: Vec<Vec<usize>>,
    d: Vec<u128>,
    r: Vec<u128>,
    s: Vec<u128>,
}

fn find_line<'a>(text: &'a str, prefix: &str) -> Result<(usize, &'a str), IoError> {
    text.lines()
        .enumerate()
        .find(|(_, l)| l.starts_with(prefix))
        .map(|(i, l)| (i + 1, l))
        .ok_or_else(|| IoError::parse(0, format!("model has no line starting with '{prefix}'")))
}

fn scalar(text: &str, name: &str) -> Result<u128, IoError> {
    let (line, l) = find_line(text, &format!("int: {name} = "))?;
    l.trim_end_matches(';')
        .rsplit(' ')
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| IoError::parse(line, format!("bad value for {name}")))
}

/// Integers inside the last `[...]` of a declaration line.
fn flat_list(text: &str, decl: &str) -> Result<Vec<u128>, IoError> {
    let (line, l) = find_line(text, decl)?;
    let open = l.rfind('[').ok_or_else(|| IoError::parse(line, "missing list"))?;
    let close = l.rfind(']').ok_or_else(|| IoError::parse(line, "missing list"))?;
    l[open + 1..close]
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| IoError::parse(line, format!("bad integer {t}"))))
        .collect()
}

fn read_data(text: &str) -> Result<Data, IoError> {
    let n = scalar(text, "n")? as usize;
    let m = scalar(text, "m")? as usize;
    let h = scalar(text, "h")?;
    let (line, l) = find_line(text, "array[1..n] of set of int: cap = ")?;
    let body = &l[l.find("= [").ok_or_else(|| IoError::parse(line, "missing cap list"))? + 3..l.len() - 2];
    let cap: Vec<Vec<usize>> = body
        .split('}')
        .filter_map(|part| part.split_once('{').map(|(_, inner)| inner))
        .map(|inner| {
            inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| IoError::parse(line, format!("bad machine {t}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let d = flat_list(text, "array[1..n, 1..m] of int: d = ")?;
    let r = flat_list(text, "array[1..n, 1..m] of int: r = ")?;
    let s = flat_list(text, "array[1..n, 1..n, 1..m] of int: s = ")?;
    if cap.len() != n || d.len() != n * m || r.len() != n * m || s.len() != n * n * m {
        return Err(IoError::parse(0, "data arrays disagree with n and m"));
    }
    Ok(Data { n, m, h, cap, d, r, s })
}

impl Data {
    fn d(&self, i: usize, k: usize) -> u128 {
        self.d[(i - 1) * self.m + (k - 1)]
    }
    fn r(&self, i: usize, k: usize) -> u128 {
        self.r[(i - 1) * self.m + (k - 1)]
    }
    fn s(&self, j: usize, i: usize, k: usize) -> u128 {
        self.s[((j - 1) * self.n + (i - 1)) * self.m + (k - 1)]
    }

    fn check(&self, a: &[usize], p: &[usize]) -> Option<ModelPoint> {
        let n = self.n;
        // distinct predecessors
        let mut used = vec![false; n + 1];
        for &pi in p.iter().filter(|&&pi| pi != 0) {
            if std::mem::replace(&mut used[pi], true) {
                return None;
            }
        }
        // at most one first job per used machine
        let firsts = p.iter().filter(|&&pi| pi == 0).count();
        let mut machines: Vec<usize> = a.to_vec();
        machines.sort_unstable();
        machines.dedup();
        if firsts > machines.len() {
            return None;
        }
        for i in 1..=n {
            // eligibility, no self predecessor
            if !self.cap[i - 1].contains(&a[i - 1]) || p[i - 1] == i {
                return None;
            }
            // predecessor on the same machine
            if p[i - 1] != 0 && a[i - 1] != a[p[i - 1] - 1] {
                return None;
            }
        }
        // least completion times
        let mut c: Vec<Option<u128>> = vec![None; n];
        for start in 1..=n {
            let mut chain = Vec::new();
            let mut i = start;
            while c[i - 1].is_none() {
                if chain.contains(&i) {
                    return None;
                }
                chain.push(i);
                if p[i - 1] == 0 {
                    break;
                }
                i = p[i - 1];
            }
            for &i in chain.iter().rev() {
                let k = a[i - 1];
                let own = self.r(i, k) + self.d(i, k);
                let value = match p[i - 1] {
                    0 => own,
                    j => own.max(c[j - 1]?.max(self.r(i, k)) + self.s(j, i, k) + self.d(i, k)),
                };
                c[i - 1] = Some(value);
            }
        }
        let c: Vec<u128> = c.into_iter().collect::<Option<_>>()?;
        if c.iter().any(|&ci| ci > self.h) {
            return None;
        }
        // spans
        let mut span = vec![0u128; self.m];
        for i in 0..n {
            span[a[i] - 1] = span[a[i] - 1].max(c[i]);
        }
        // levels by ascending span
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_by_key(|&k| span[k]);
        let mut lvl = vec![0; self.m];
        for (rank, &k) in order.iter().enumerate() {
            lvl[k] = rank + 1;
        }
        let ordered = (0..self.m).all(|x| (0..self.m).all(|y| lvl[x] <= lvl[y] || span[x] >= span[y]));
        ordered.then(|| ModelPoint { a: a.to_vec(), p: p.to_vec(), c, span })
    }
}

/// Every feasible point of an emitted model, in lexicographic `(a, p)` order.
pub fn check_minizinc(model: &str) -> Result<Vec<ModelPoint>, IoError> {
    let data = read_data(model)?;
    let (n, m) = (data.n, data.m);
    let size = (m as u128).saturating_pow(n as u32).saturating_mul((n as u128 + 1).saturating_pow(n as u32));
    if size > DOMAIN_CAP {
        return Err(IoError::parse(0, format!("domain of {size} points is too large to enumerate")));
    }
    let mut points = Vec::new();
    let mut a = vec![1usize; n];
    loop {
        let mut p = vec![0usize; n];
        loop {
            if let Some(pt) = data.check(&a, &p) {
                points.push(pt);
            }
            if !odometer(&mut p, 0, n) {
                break;
            }
        }
        if !odometer(&mut a, 1, m) {
            break;
        }
    }
    Ok(points)
}

/// Advances `digits` (each in `lo..=hi`) to the next value; false on wrap.
fn odometer(digits: &mut [usize], lo: usize, hi: usize) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < hi {
            *d += 1;
            return true;
        }
        *d = lo;
    }
    false
}
