use std::collections::BTreeSet;

use serde::Serialize;

use super::{CombinedState, EngineError, Lts, Refusal, System};
use crate::control::Event;
use crate::data::Env;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Invariant { name: String },
    Theorem { name: String },
    /// The ASTD enables the event but its data guard is false.
    Calling { event: String },
    /// Guard true but no after-state satisfies the action.
    Infeasible { event: String },
    /// Two copies of a value disagree at a stable point.
    Gluing { left: String, right: String },
}

/// A failed check with a replayable witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub state: usize,
    /// Target of the offending transition, for two-state checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    /// Events from the initial state to `state`, then the offending event
    /// if there is one.
    pub trace: Vec<String>,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let what = match &self.kind {
            ViolationKind::Invariant { name } => format!("invariant `{name}` violated"),
            ViolationKind::Theorem { name } => format!("theorem `{name}` violated"),
            ViolationKind::Calling { event } => format!("`{event}` called with its guard false"),
            ViolationKind::Infeasible { event } => format!("`{event}` has no after-state"),
            ViolationKind::Gluing { left, right } => format!("`{left}` differs from `{right}`"),
        };
        write!(f, "{what} after [{}]: {}", self.trace.join(", "), self.detail)
    }
}

fn witness(lts: &Lts, state: usize, last: Option<&Event>) -> Vec<String> {
    let mut t: Vec<String> = lts.trace_to(state).iter().map(Event::to_string).collect();
    t.extend(last.map(Event::to_string));
    t
}

/// Evaluates every invariant on every state.
pub fn check_invariants(sys: &System, lts: &Lts) -> Result<Vec<Violation>, EngineError> {
    let mut out = Vec::new();
    for (i, s) in lts.states.iter().enumerate() {
        for inv in &sys.doc.invariants {
            if !sys.eval().eval_pred(&inv.pred, &s.data, None, &mut Env::new())? {
                out.push(Violation {
                    kind: ViolationKind::Invariant {
                        name: inv.name.clone(),
                    },
                    state: i,
                    target: None,
                    trace: witness(lts, i, None),
                    detail: sys.describe(s),
                });
            }
        }
    }
    Ok(out)
}

/// Evaluates each event theorem over every transition carrying its label.
pub fn check_theorems(sys: &System, lts: &Lts) -> Result<Vec<Violation>, EngineError> {
    let mut out = Vec::new();
    for e in &lts.edges {
        let ev = &lts.alphabet[e.event];
        let theorems: Vec<_> = sys.doc.theorems.iter().filter(|t| t.event == ev.label).collect();
        if theorems.is_empty() {
            continue;
        }
        let mut env = Env::new();
        let def = sys.event_def(&ev.label).ok_or_else(|| EngineError::UnknownEvent(ev.label.clone()))?;
        for (p, v) in def.params.iter().zip(sys.event_args(ev)?) {
            env.bind(p.name.clone(), v);
        }
        let (pre, post) = (&lts.states[e.from], &lts.states[e.to]);
        for t in theorems {
            if !sys.eval().eval_pred(&t.pred, &pre.data, Some(&post.data), &mut env)? {
                out.push(Violation {
                    kind: ViolationKind::Theorem { name: t.name.clone() },
                    state: e.from,
                    target: Some(e.to),
                    trace: witness(lts, e.from, Some(ev)),
                    detail: format!("{}  -->  {}", sys.describe(pre), sys.describe(post)),
                });
            }
        }
    }
    Ok(out)
}

/// Reachable states where the ASTD enables an event that the data layer
/// cannot execute. Each (control state, event) pair is reported once.
pub fn check_calling_consistency(sys: &System, lts: &Lts) -> Vec<Violation> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &(s, ei, refusal) in &lts.refusals {
        let ev = &lts.alphabet[ei];
        if !seen.insert((&lts.states[s].control, ei)) {
            continue;
        }
        let kind = match refusal {
            Refusal::DataGuard => ViolationKind::Calling { event: ev.to_string() },
            Refusal::Infeasible => ViolationKind::Infeasible { event: ev.to_string() },
            Refusal::Control => continue,
        };
        out.push(Violation {
            kind,
            state: s,
            target: None,
            trace: witness(lts, s, Some(ev)),
            detail: sys.describe(&lts.states[s]),
        });
    }
    out
}

/// True iff some run of the system consumes the whole trace.
pub fn trace_accept(sys: &System, trace: &[Event]) -> Result<bool, EngineError> {
    let mut current: BTreeSet<CombinedState> = BTreeSet::from([sys.initial()?]);
    for e in trace {
        if sys.event_def(&e.label).is_none() {
            return Ok(false);
        }
        let mut next = BTreeSet::new();
        for s in &current {
            next.extend(sys.combined_step(s, e)?.successors);
        }
        if next.is_empty() {
            return Ok(false);
        }
        current = next;
    }
    Ok(true)
}
