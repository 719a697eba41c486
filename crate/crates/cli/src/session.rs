//! Animation sessions: a current state, the trace that led to it and an
//! undo stack. Used by the terminal stepper and the HTTP service.

use std::sync::Arc;

use astd_core::control::{AstdNode, ControlState, Event};
use astd_core::data::Env;
use astd_core::engine::{CombinedState, EngineError, Refusal, System};
use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("`{event}` refused: {}", reason.reason())]
    Refused { event: String, reason: Refusal },
    #[error("`{event}` has {count} successors, no choice {choice}")]
    BadChoice {
        event: String,
        choice: usize,
        count: usize,
    },
    #[error("bad event `{0}`: {1}")]
    BadEvent(String, String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One performed step: the event and which successor was taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStep {
    pub event: String,
    pub choice_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Enabled {
    pub event: String,
    pub successor_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataVar {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantStatus {
    pub name: String,
    /// `None` when evaluation failed.
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What a client needs to draw the current state.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub spec: String,
    pub state: String,
    pub control_tree: Json,
    pub data_vars: Vec<DataVar>,
    pub invariant_status: Vec<InvariantStatus>,
    pub enabled: Vec<Enabled>,
    pub trace: Vec<TraceStep>,
}

pub struct Session {
    sys: Arc<System>,
    initial: CombinedState,
    current: CombinedState,
    trace: Vec<TraceStep>,
    history: Vec<CombinedState>,
}

impl Session {
    pub fn new(sys: Arc<System>) -> Result<Session, EngineError> {
        let initial = sys.initial()?;
        Ok(Session {
            current: initial.clone(),
            initial,
            sys,
            trace: Vec::new(),
            history: Vec::new(),
        })
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    pub fn current(&self) -> &CombinedState {
        &self.current
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    /// Ground events with at least one successor, in alphabet order.
    pub fn enabled(&self) -> Result<Vec<Enabled>, EngineError> {
        let mut out = Vec::new();
        for e in self.sys.alphabet() {
            let r = self.sys.combined_step(&self.current, e)?;
            if !r.successors.is_empty() {
                out.push(Enabled {
                    event: e.to_string(),
                    successor_count: r.successors.len(),
                });
            }
        }
        Ok(out)
    }

    /// Successors of `event`, in the engine's order.
    pub fn successors(&self, event: &str) -> Result<Vec<CombinedState>, StepError> {
        let ev = self.parse_event(event)?;
        let r = self.sys.combined_step(&self.current, &ev)?;
        match r.refusal {
            Some(reason) => Err(StepError::Refused {
                event: ev.to_string(),
                reason,
            }),
            None => Ok(r.successors),
        }
    }

    fn parse_event(&self, text: &str) -> Result<Event, StepError> {
        let ev = Event::parse(text).map_err(|e| StepError::BadEvent(text.to_string(), e))?;
        self.sys
            .event_args(&ev)
            .map_err(|e| StepError::BadEvent(text.to_string(), e.to_string()))?;
        Ok(ev)
    }

    pub fn step(&mut self, event: &str, choice: usize) -> Result<(), StepError> {
        let succ = self.successors(event)?;
        let event = self.parse_event(event)?.to_string();
        let next = succ.get(choice).cloned().ok_or(StepError::BadChoice {
            event: event.clone(),
            choice,
            count: succ.len(),
        })?;
        self.history.push(std::mem::replace(&mut self.current, next));
        self.trace.push(TraceStep {
            event,
            choice_index: choice,
        });
        Ok(())
    }

    /// Returns false when already at the initial state.
    pub fn undo(&mut self) -> bool {
        match self.history.pop() {
            Some(prev) => {
                self.current = prev;
                self.trace.pop();
                true
            }
            None => false,
        }
    }

    pub fn reset(&mut self) {
        self.current = self.initial.clone();
        self.trace.clear();
        self.history.clear();
    }

    /// Replays the trace from the initial state.
    pub fn replay(&self) -> Result<CombinedState, StepError> {
        let mut s = Session::new(self.sys.clone())?;
        for t in &self.trace {
            s.step(&t.event, t.choice_index)?;
        }
        Ok(s.current)
    }

    pub fn snapshot(&self) -> Result<Snapshot, EngineError> {
        let sys = &*self.sys;
        let data = &self.current.data;
        let data_vars = sys
            .describe_data(data)
            .into_iter()
            .map(|(name, value)| DataVar { name, value })
            .collect();
        let invariant_status = sys
            .doc
            .invariants
            .iter()
            .map(|inv| match sys.eval().eval_pred(&inv.pred, data, None, &mut Env::new()) {
                Ok(b) => InvariantStatus {
                    name: inv.name.clone(),
                    holds: Some(b),
                    error: None,
                },
                Err(e) => InvariantStatus {
                    name: inv.name.clone(),
                    holds: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        let control_tree = match &sys.root {
            Some(root) => control_tree(sys, root, &self.current.control),
            None => Json::Null,
        };
        Ok(Snapshot {
            spec: sys.doc.name.clone(),
            state: sys.describe(&self.current),
            control_tree,
            data_vars,
            invariant_status,
            enabled: self.enabled()?,
            trace: self.trace.clone(),
        })
    }
}

/// JSON shaped like the ASTD, with the current state of every part.
pub fn control_tree(sys: &System, node: &AstdNode, state: &ControlState) -> Json {
    match (node, state) {
        (AstdNode::Elem, _) => json!({ "kind": "elem" }),
        (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => {
            let (name, body) = &a.states[*current];
            let mut j = json!({
                "kind": "automaton",
                "name": a.name,
                "state": name,
                "final": a.finals.contains(name),
            });
            if !body.is_elem() {
                j["sub"] = control_tree(sys, body, sub);
            }
            j
        }
        (AstdNode::Kleene(b), ControlState::Kleene { started, sub }) => json!({
            "kind": "kleene",
            "started": started,
            "body": control_tree(sys, b, sub),
        }),
        (AstdNode::Quant(q), ControlState::Quant(f)) => {
            let names: Vec<String> = sys
                .universe
                .atoms_of(&q.domain)
                .unwrap_or_default()
                .into_iter()
                .map(|a| sys.universe.atom_name(a).to_string())
                .collect();
            let instances: Vec<Json> = names
                .iter()
                .zip(f)
                .map(|(n, s)| json!({ "value": n, "state": control_tree(sys, &q.body, s) }))
                .collect();
            json!({
                "kind": "quantification",
                "operator": match q.kind {
                    astd_core::control::QuantKind::Interleave => "interleave",
                    astd_core::control::QuantKind::Sync => "sync",
                    astd_core::control::QuantKind::WeakSync => "weak-sync",
                },
                "var": q.var,
                "domain": q.domain,
                "instances": instances,
            })
        }
        _ => json!({ "kind": "mismatch" }),
    }
}
