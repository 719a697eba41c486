//! Trace refinement between explored systems, event relations and gluing.

mod lang;
mod relations;


use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::control::Event;
use crate::data::{Env, Expr};
use crate::engine::{EngineError, Lts, System, Violation, ViolationKind};

pub use lang::{find_unmatched_trace, traces_up_to, Graph};
pub use relations::{
    close_universe, compose, event_relation, identity, relations_commute, seq_equivalence,
    EventRelation, Pairs,
};

#[derive(Debug, Error)]
pub enum RefinementError {
    #[error("the {0} state space is truncated; no verdict")]
    Truncated(&'static str),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail {
        /// Shortest trace on one side that the other side cannot follow.
        counterexample: Vec<String>,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn counterexample(&self) -> Option<&[String]> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail { counterexample } => Some(counterexample),
        }
    }

    fn from_trace(t: Option<Vec<Event>>) -> Verdict {
        match t {
            None => Verdict::Pass,
            Some(t) => Verdict::Fail {
                counterexample: t.iter().map(Event::to_string).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Preservation,
    Inclusion,
    Projection(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefinementConfig {
    /// Labels of the concrete system treated as internal steps.
    pub new_labels: BTreeSet<String>,
    /// Labels of the abstract system treated as internal steps.
    pub abstract_hidden: BTreeSet<String>,
    /// Abstract labels shown under a concrete name; the renamed event has
    /// no arguments (used to match `compute_l(t)` with the global
    /// `compute`).
    pub renames: BTreeMap<String, String>,
}

impl RefinementConfig {
    pub fn with_new(labels: &[&str]) -> Self {
        RefinementConfig {
            new_labels: labels.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    fn abstract_view(&self, g: &Graph) -> Graph {
        g.relabel(|e| {
            if self.abstract_hidden.contains(&e.label) {
                None
            } else if let Some(to) = self.renames.get(&e.label) {
                Some(Event {
                    label: to.clone(),
                    args: Vec::new(),
                })
            } else {
                Some(e.clone())
            }
        })
    }
}

fn complete(lts: &Lts, which: &'static str) -> Result<Graph, RefinementError> {
    if lts.truncated {
        return Err(RefinementError::Truncated(which));
    }
    Ok(Graph::from_lts(lts))
}

/// Every visible abstract trace is a visible trace of the concrete system
/// once its new events are hidden.
pub fn trace_preservation(
    abs: &Lts,
    conc: &Lts,
    cfg: &RefinementConfig,
) -> Result<Verdict, RefinementError> {
    let a = cfg.abstract_view(&complete(abs, "abstract")?);
    let c = complete(conc, "concrete")?.hide(&cfg.new_labels);
    Ok(Verdict::from_trace(find_unmatched_trace(&a, &c)))
}

/// Every visible concrete trace is a visible abstract trace.
pub fn trace_inclusion(
    conc: &Lts,
    abs: &Lts,
    cfg: &RefinementConfig,
) -> Result<Verdict, RefinementError> {
    let a = cfg.abstract_view(&complete(abs, "abstract")?);
    let c = complete(conc, "concrete")?.hide(&cfg.new_labels);
    Ok(Verdict::from_trace(find_unmatched_trace(&c, &a)))
}

/// The concrete system seen from one instance: events naming the instance
/// stay visible, synchronised events stay visible where the instance had
/// to take part, everything else becomes internal.
pub fn project(
    sys: &System,
    lts: &Lts,
    instance: &str,
    new_labels: &BTreeSet<String>,
) -> Result<Graph, RefinementError> {
    let atom = sys
        .universe
        .atom(instance)
        .ok_or_else(|| RefinementError::Config(format!("unknown instance `{instance}`")))?;
    let mut edges = Vec::with_capacity(lts.edges.len());
    for e in &lts.edges {
        let ev = &lts.alphabet[e.event];
        let keep = if new_labels.contains(&ev.label) {
            false
        } else if ev.args.is_empty() {
            sys.sync_required(&ev.label, &lts.states[e.from].data, atom)?
        } else {
            ev.args.iter().any(|a| a == instance)
        };
        edges.push((e.from, keep.then(|| ev.clone()), e.to));
    }
    Ok(Graph {
        states: lts.states.len(),
        initial: lts.initial,
        edges,
    })
}

/// Outcome of a projection check: the deciding direction and the
/// informational converse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionVerdict {
    pub instance: String,
    /// Abstract single-instance traces all survive in the projection.
    pub preservation: Verdict,
    /// Projected traces all belong to the abstract single instance.
    pub inclusion: Verdict,
}

/// Compares the one-instance abstract system `abs_single` with the
/// concrete global system projected on `instance`.
pub fn projection_refinement(
    abs_single: &Lts,
    conc_sys: &System,
    conc: &Lts,
    instance: &str,
    cfg: &RefinementConfig,
) -> Result<ProjectionVerdict, RefinementError> {
    let a = cfg.abstract_view(&complete(abs_single, "abstract")?);
    if conc.truncated {
        return Err(RefinementError::Truncated("concrete"));
    }
    let p = project(conc_sys, conc, instance, &cfg.new_labels)?;
    Ok(ProjectionVerdict {
        instance: instance.to_string(),
        preservation: Verdict::from_trace(find_unmatched_trace(&a, &p)),
        inclusion: Verdict::from_trace(find_unmatched_trace(&p, &a)),
    })
}

/// States where no communication label is enabled.
pub fn stable_states(lts: &Lts, comm_labels: &BTreeSet<String>) -> Vec<usize> {
    let mut unstable = vec![false; lts.states.len()];
    for e in &lts.edges {
        if comm_labels.contains(&lts.alphabet[e.event].label) {
            unstable[e.from] = true;
        }
    }
    (0..lts.states.len()).filter(|&i| !unstable[i]).collect()
}

/// Checks `left = right` for every pair on every stable state.
pub fn gluing_check(
    sys: &System,
    lts: &Lts,
    pairs: &[(Expr, Expr)],
    comm_labels: &BTreeSet<String>,
) -> Result<Vec<Violation>, RefinementError> {
    let mut out = Vec::new();
    if pairs.is_empty() {
        return Ok(out);
    }
    let eval = sys.eval();
    for i in stable_states(lts, comm_labels) {
        let d = &lts.states[i].data;
        for (l, r) in pairs {
            let lv = eval.eval_expr(l, d, None, &Env::new()).map_err(EngineError::from)?;
            let rv = eval.eval_expr(r, d, None, &Env::new()).map_err(EngineError::from)?;
            if lv != rv {
                out.push(Violation {
                    kind: ViolationKind::Gluing {
                        left: crate::spec_lang::render_expr(l),
                        right: crate::spec_lang::render_expr(r),
                    },
                    state: i,
                    target: None,
                    trace: lts.trace_to(i).iter().map(Event::to_string).collect(),
                    detail: format!("{} vs {}", eval.show(&lv), eval.show(&rv)),
                });
            }
        }
    }
    Ok(out)
}
