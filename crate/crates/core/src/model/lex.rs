use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{Evaluation, ModelError};
use crate::time::Time;

/// All machine spans in non-ascending order. Compared lexicographically,
/// a smaller tuple means a smaller makespan, with ties broken by the
/// next-largest span and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexMakespan<T>(Vec<T>);

impl<T: Time> LexMakespan<T> {
    pub fn from_spans(spans: &[T]) -> Self {
        let mut v = spans.to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        LexMakespan(v)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The i-th largest span, 1-based.
    pub fn level(&self, i: usize) -> T {
        self.0[i - 1]
    }

    pub fn makespan(&self) -> T {
        self.0.first().copied().unwrap_or_else(T::zero)
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T: Time> std::fmt::Display for LexMakespan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub fn lex_makespan<T: Time>(evaluation: &Evaluation<T>) -> LexMakespan<T> {
    LexMakespan::from_spans(&evaluation.span)
}

/// Compares the first `l` components lexicographically.
pub fn compare_lex<T: Time>(a: &LexMakespan<T>, b: &LexMakespan<T>, l: usize) -> Result<Ordering, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::ShapeMismatch {
            expected: format!("{} spans", a.len()),
            found: format!("{} spans", b.len()),
        });
    }
    if l == 0 || l > a.len() {
        return Err(ModelError::LevelOutOfRange { level: l, machines: a.len() });
    }
    Ok(a.0[..l].cmp(&b.0[..l]))
}

/// Anything exposing one span per machine.
pub trait MachineSpans<T> {
    fn machine_spans(&self) -> &[T];
}

impl<T: Time> MachineSpans<T> for Evaluation<T> {
    fn machine_spans(&self) -> &[T] {
        &self.span
    }
}

impl<T: Time> MachineSpans<T> for LexMakespan<T> {
    fn machine_spans(&self) -> &[T] {
        &self.0
    }
}

/// Number of machines completing at or before `t`.
pub fn completion_count<T: Time>(spans: &impl MachineSpans<T>, t: T) -> usize {
    spans.machine_spans().iter().filter(|&&s| s <= t).count()
}

/// True iff some time point `t` has strictly more machines of `a` completed
/// than of `b`, and `a` never falls behind `b` after `t`.
///
/// Completion counts are right-continuous step functions that only change
/// at span values, so probing the union of both span sets is exhaustive.
///
/// # Panics
/// If the two machine counts differ.
pub fn dominates_by_completion<T: Time>(a: &impl MachineSpans<T>, b: &impl MachineSpans<T>) -> bool {
    let (sa, sb) = (a.machine_spans(), b.machine_spans());
    assert_eq!(sa.len(), sb.len(), "machine counts differ");
    let mut points: Vec<T> = sa.iter().chain(sb).copied().collect();
    points.sort_unstable();
    points.dedup();
    // Walk from the latest probe backwards, tracking whether a stays
    // ahead-or-equal at every later probe.
    let mut never_behind_after = true;
    for &t in points.iter().rev() {
        let ca = completion_count(a, t);
        let cb = completion_count(b, t);
        if ca > cb && never_behind_after {
            return true;
        }
        if ca < cb {
            never_behind_after = false;
        }
    }
    false
}
