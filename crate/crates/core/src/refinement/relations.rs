use std::collections::{BTreeMap, BTreeSet};

use super::{RefinementError, Verdict};
use crate::control::Event;
use crate::data::{DataState, Env, Expr, Value};
use crate::engine::{EngineError, System};

pub type Pairs = BTreeSet<(DataState, DataState)>;

/// Before/after pairs of one ground event over a set of data states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRelation {
    pub event: Event,
    pub pairs: Pairs,
}

fn successors(sys: &System, event: &Event, d: &DataState) -> Result<BTreeSet<DataState>, EngineError> {
    let def = sys
        .event_def(&event.label)
        .ok_or_else(|| EngineError::UnknownEvent(event.label.clone()))?;
    let args = sys.event_args(event)?;
    if !sys.eval().event_enabled(def, &args, d)? {
        return Ok(BTreeSet::new());
    }
    Ok(sys.eval().event_fire(def, &args, d)?)
}

pub fn event_relation(
    sys: &System,
    event: &Event,
    universe: &BTreeSet<DataState>,
) -> Result<EventRelation, EngineError> {
    let mut pairs = BTreeSet::new();
    for d in universe {
        for post in successors(sys, event, d)? {
            pairs.insert((d.clone(), post));
        }
    }
    Ok(EventRelation {
        event: event.clone(),
        pairs,
    })
}

/// Smallest superset of `universe` closed under the given events.
pub fn close_universe(
    sys: &System,
    universe: &BTreeSet<DataState>,
    events: &[Event],
) -> Result<BTreeSet<DataState>, EngineError> {
    let mut all = universe.clone();
    let mut todo: Vec<DataState> = universe.iter().cloned().collect();
    while let Some(d) = todo.pop() {
        for e in events {
            for post in successors(sys, e, &d)? {
                if all.insert(post.clone()) {
                    todo.push(post);
                }
            }
        }
    }
    Ok(all)
}

pub fn identity(universe: &BTreeSet<DataState>) -> Pairs {
    universe.iter().map(|d| (d.clone(), d.clone())).collect()
}

/// Relational composition `r1 ; r2` (first `r1`, then `r2`).
pub fn compose(r1: &Pairs, r2: &Pairs) -> Pairs {
    let mut by_source: BTreeMap<&DataState, Vec<&DataState>> = BTreeMap::new();
    for (a, b) in r2 {
        by_source.entry(a).or_default().push(b);
    }
    let mut out = BTreeSet::new();
    for (a, b) in r1 {
        for c in by_source.get(b).into_iter().flatten() {
            out.insert((a.clone(), (*c).clone()));
        }
    }
    out
}

pub fn relations_commute(r1: &Pairs, r2: &Pairs) -> bool {
    compose(r1, r2) == compose(r2, r1)
}

/// For every state `d`, firing `whole` equals firing `part(t)` for each
/// `t` in `over` (evaluated at `d`), in sort order.
pub fn seq_equivalence(
    sys: &System,
    universe: &BTreeSet<DataState>,
    whole: &Event,
    part: &str,
    over: &Expr,
) -> Result<Verdict, RefinementError> {
    for d in universe {
        let direct = successors(sys, whole, d)?;
        let members = match sys
            .eval()
            .eval_expr(over, d, None, &Env::new())
            .map_err(EngineError::from)?
        {
            Value::Set(s) => s,
            _ => return Err(RefinementError::Config("`over` is not a set".into())),
        };
        let mut current = BTreeSet::from([d.clone()]);
        let mut steps = Vec::new();
        for m in &members {
            let Value::Atom(a) = m else {
                return Err(RefinementError::Config("`over` must hold atoms".into()));
            };
            let ev = Event {
                label: part.to_string(),
                args: vec![sys.universe.atom_name(*a).to_string()],
            };
            let mut next = BTreeSet::new();
            for x in &current {
                next.extend(successors(sys, &ev, x)?);
            }
            current = next;
            steps.push(ev.to_string());
        }
        if current != direct {
            let vars: Vec<String> = sys
                .describe_data(d)
                .into_iter()
                .map(|(n, v)| format!("{n} = {v}"))
                .collect();
            return Ok(Verdict::Fail {
                counterexample: vec![
                    format!("state: {}", vars.join(", ")),
                    format!("{whole}: {} after-states", direct.len()),
                    format!("{}: {} after-states", steps.join(" ; "), current.len()),
                ],
            });
        }
    }
    Ok(Verdict::Pass)
}
