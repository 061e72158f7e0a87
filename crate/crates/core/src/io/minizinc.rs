//! MiniZinc model emitter. The makespan objective keeps only the
//! assignment, sequencing and timing constraints; the lex objective adds
//! spans and levels.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::model::Instance;
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Makespan,
    Lex,
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "makespan" => Ok(Objective::Makespan),
            "lex" => Ok(Objective::Lex),
            other => Err(format!("unknown objective {other}")),
        }
    }
}

fn list<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(", ")
}

/// Emits a self-contained MiniZinc model. Ineligible durations, releases and
/// setups are written as 0 and never read because of the eligibility constraint.
pub fn export_minizinc<T: Time>(inst: &Instance<T>, objective: Objective) -> String {
    let (m, n) = (inst.machine_count(), inst.job_count());
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "% Lexicographic makespan scheduling on unrelated parallel machines.").unwrap();
    writeln!(w, "% Machines: {}", list(inst.machine_names().iter().cloned())).unwrap();
    writeln!(w, "% Jobs: {}", list(inst.job_names().iter().cloned())).unwrap();
    writeln!(w, "% Span domains start at 0 so that empty machines are representable.").unwrap();
    if objective == Objective::Lex {
        writeln!(w, "%").unwrap();
        writeln!(w, "% WARNING: the objective weights span[k] by h^(lvl[k]-1). For large h or m").unwrap();
        writeln!(w, "% it exceeds the integer range of most solvers and can overflow.").unwrap();
    }
    writeln!(w, "include \"globals.mzn\";").unwrap();
    writeln!(w).unwrap();

    writeln!(w, "int: n = {n};").unwrap();
    writeln!(w, "int: m = {m};").unwrap();
    writeln!(w, "int: h = {};", inst.horizon()).unwrap();
    let caps = list((0..n).map(|j| format!("{{{}}}", list(inst.cap(j).iter().map(|k| (k + 1).to_string())))));
    writeln!(w, "array[1..n] of set of int: cap = [{caps}];").unwrap();
    let table = |f: &dyn Fn(usize, usize) -> T| {
        list((0..n).flat_map(|j| (0..m).map(move |k| (j, k))).map(|(j, k)| {
            if inst.is_eligible(j, k) {
                f(j, k).to_string()
            } else {
                "0".to_string()
            }
        }))
    };
    writeln!(w, "array[1..n, 1..m] of int: d = array2d(1..n, 1..m, [{}]);", table(&|j, k| inst.d(j, k))).unwrap();
    writeln!(w, "array[1..n, 1..m] of int: r = array2d(1..n, 1..m, [{}]);", table(&|j, k| inst.r(j, k))).unwrap();
    let setups =
        list((0..n).flat_map(|i| (0..n).flat_map(move |j| (0..m).map(move |k| (i, j, k)))).map(|(i, j, k)| {
            if i != j && inst.is_eligible(i, k) && inst.is_eligible(j, k) {
                inst.s(i, j, k).to_string()
            } else {
                "0".to_string()
            }
        }));
    writeln!(w, "array[1..n, 1..n, 1..m] of int: s = array3d(1..n, 1..n, 1..m, [{setups}]);").unwrap();
    writeln!(w).unwrap();

    writeln!(w, "array[1..n] of var 1..m: a;").unwrap();
    writeln!(w, "array[1..n] of var 0..n: p;").unwrap();
    writeln!(w, "array[1..n] of var 0..h: c;").unwrap();
    if objective == Objective::Lex {
        writeln!(w, "array[1..m] of var 0..h: span;").unwrap();
        writeln!(w, "array[1..m] of var 1..m: lvl;").unwrap();
    }
    writeln!(w).unwrap();

    let constraints: [(&str, &str); 7] = [
        ("no two jobs share a predecessor", "alldifferent_except_0(p)"),
        ("at most one first job per used machine", "sum(i in 1..n)(bool2int(p[i] = 0)) <= nvalue(a)"),
        ("eligibility", "forall(i in 1..n)(a[i] in cap[i])"),
        ("predecessor on the same machine", "forall(i, j in 1..n where i != j)(p[i] = j -> a[i] = a[j])"),
        ("no job precedes itself", "forall(i in 1..n)(p[i] != i)"),
        (
            "precedence timing",
            "forall(i, j in 1..n where i != j)(c[i] >= (max(c[j], r[i, a[i]]) + s[j, i, a[i]] + d[i, a[i]]) * bool2int(p[i] = j))",
        ),
        ("release timing", "forall(i in 1..n)(c[i] >= r[i, a[i]] + d[i, a[i]])"),
    ];
    for (comment, body) in constraints {
        writeln!(w, "% {comment}\nconstraint {body};").unwrap();
    }
    match objective {
        Objective::Makespan => {
            writeln!(w).unwrap();
            writeln!(w, "solve minimize max([0] ++ c);").unwrap();
        }
        Objective::Lex => {
            let lex: [(&str, &str); 3] = [
                (
                    "(8) span definition",
                    "forall(k in 1..m)(span[k] = max([0] ++ [c[i] * bool2int(a[i] = k) | i in 1..n]))",
                ),
                ("distinct levels", "alldifferent(lvl)"),
                ("levels order spans", "forall(i, j in 1..m)(lvl[i] > lvl[j] -> span[i] >= span[j])"),
            ];
            for (comment, body) in lex {
                writeln!(w, "% {comment}\nconstraint {body};").unwrap();
            }
            writeln!(w).unwrap();
            let terms: Vec<String> = (1..=m).map(|k| format!("pow(h, lvl[{k}] - 1) * span[{k}]")).collect();
            writeln!(w, "solve minimize {};", terms.join(" + ")).unwrap();
        }
    }
    out
}
