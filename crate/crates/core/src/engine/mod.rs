//! Coupled control/data execution, exploration and checks.

mod checks;
mod explore;
mod export;


use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::control::{
    self, AstdNode, ControlError, ControlState, Event, GuardContext, QuantKind, StepOptions,
};
use crate::data::{
    Atom, DataState, Env, EvalCtx, EvalError, EventDef, Pred, Schema, Universe, Value,
};
use crate::spec_lang::{ConstDef, SpecDoc, OPT_WEAK_SYNC_STRICT};

pub use checks::{
    check_calling_consistency, check_invariants, check_theorems, trace_accept, Violation,
    ViolationKind,
};
pub use explore::{explore, Bounds, Edge, Lts};
pub use export::{lts_to_dot, lts_to_json};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("bad argument for `{event}`: {reason}")]
    BadArgument { event: String, reason: String },
    #[error("{source} (in state {state}, on {event})")]
    InState {
        state: String,
        event: String,
        #[source]
        source: Box<EngineError>,
    },
}

/// A control state paired with a data state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinedState {
    pub control: ControlState,
    pub data: DataState,
}

/// Why an event produced no successor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Refusal {
    /// The ASTD has no enabled transition for the event.
    Control,
    /// The ASTD accepts but the event's guard is false.
    DataGuard,
    /// Guard true, but the action has no after-state.
    Infeasible,
}

impl Refusal {
    pub fn reason(self) -> &'static str {
        match self {
            Refusal::Control => "control refuses",
            Refusal::DataGuard => "data guard is false",
            Refusal::Infeasible => "action is infeasible",
        }
    }
}

/// Result of offering one event to one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepResult {
    /// Sorted, duplicate-free.
    pub successors: Vec<CombinedState>,
    pub refusal: Option<Refusal>,
}

/// A loaded specification ready for execution.
#[derive(Clone, Debug)]
pub struct System {
    pub doc: SpecDoc,
    pub universe: Universe,
    pub schema: Schema,
    pub constants: HashMap<String, Value>,
    /// `None` when the document has no ASTD: every event is then accepted
    /// by the control layer.
    pub root: Option<AstdNode>,
    /// Bindings in force around the root (set for single-instance views).
    pub root_env: Env,
    pub options: StepOptions,
    events: HashMap<String, usize>,
    alphabet: Vec<Event>,
}

struct DataGuards<'a> {
    sys: &'a System,
    data: &'a DataState,
}

impl GuardContext for DataGuards<'_> {
    fn holds(&self, pred: &Pred, env: &Env) -> Result<bool, EvalError> {
        if *pred == Pred::True {
            return Ok(true);
        }
        let mut env = env.clone();
        self.sys.eval().eval_pred(pred, self.data, None, &mut env)
    }

    fn domain(&self, sort: &str) -> Option<Vec<Atom>> {
        self.sys.universe.atoms_of(sort)
    }

    fn atom(&self, name: &str) -> Option<Atom> {
        self.sys.universe.atom(name)
    }
}

impl System {
    pub fn new(doc: SpecDoc) -> Result<System, EngineError> {
        let mut universe = Universe::new();
        for s in &doc.sorts {
            universe.add_sort(&s.name, &s.elements).map_err(EngineError::Spec)?;
        }
        let schema = Schema::new(
            doc.variables
                .iter()
                .map(|v| (v.name.clone(), v.ty.clone()))
                .collect(),
        );
        let mut constants = HashMap::new();
        let empty_schema = Schema::default();
        let nothing = DataState(Vec::new());
        for c in &doc.constants {
            let v = match &c.def {
                ConstDef::Order(sort) => {
                    let atoms = universe
                        .atoms_of(sort)
                        .ok_or_else(|| EngineError::Spec(format!("unknown sort `{sort}`")))?;
                    let mut pairs = BTreeSet::new();
                    for (i, a) in atoms.iter().enumerate() {
                        for b in &atoms[i + 1..] {
                            pairs.insert(Value::pair(Value::Atom(*a), Value::Atom(*b)));
                        }
                    }
                    Value::Set(pairs)
                }
                ConstDef::Expr(e) => EvalCtx::new(&universe, &empty_schema, &constants)
                    .eval_expr(e, &nothing, None, &Env::new())?,
            };
            constants.insert(c.name.clone(), v);
        }
        let events = doc
            .events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.def.label.clone(), i))
            .collect();
        let mut alphabet = Vec::new();
        for e in &doc.events {
            let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
            for p in &e.def.params {
                let elems = &doc
                    .sort(&p.sort)
                    .ok_or_else(|| EngineError::Spec(format!("unknown sort `{}`", p.sort)))?
                    .elements;
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        elems.iter().map(move |a| {
                            let mut t = t.clone();
                            t.push(a.clone());
                            t
                        })
                    })
                    .collect();
            }
            for args in tuples {
                alphabet.push(Event {
                    label: e.def.label.clone(),
                    args,
                });
            }
        }
        let options = StepOptions {
            weak_sync_strict: doc.has_option(OPT_WEAK_SYNC_STRICT),
        };
        Ok(System {
            root: doc.astd.clone(),
            doc,
            universe,
            schema,
            constants,
            root_env: Env::new(),
            options,
            events,
            alphabet,
        })
    }

    /// The body of the root quantification with its variable fixed to
    /// `instance`: the one-entity view `A(instance)`.
    pub fn single_instance(doc: SpecDoc, instance: &str) -> Result<System, EngineError> {
        let mut sys = System::new(doc)?;
        let Some(AstdNode::Quant(q)) = sys.root.take() else {
            return Err(EngineError::Spec("root is not a quantification".into()));
        };
        let atom = sys
            .universe
            .atom(instance)
            .filter(|a| sys.universe.sort_name(a.sort) == q.domain)
            .ok_or_else(|| EngineError::Spec(format!("`{instance}` is not in {}", q.domain)))?;
        sys.root_env.bind(q.var.clone(), Value::Atom(atom));
        sys.root = Some(*q.body);
        Ok(sys)
    }

    pub fn eval(&self) -> EvalCtx<'_> {
        EvalCtx::new(&self.universe, &self.schema, &self.constants)
    }

    /// Every ground event: each label with every well-sorted argument tuple.
    pub fn alphabet(&self) -> &[Event] {
        &self.alphabet
    }

    pub fn event_def(&self, label: &str) -> Option<&EventDef> {
        self.events.get(label).map(|&i| &self.doc.events[i].def)
    }

    pub fn is_pure(&self, label: &str) -> bool {
        self.events
            .get(label)
            .is_some_and(|&i| self.doc.events[i].pure)
    }

    pub fn initial(&self) -> Result<CombinedState, EngineError> {
        let nothing = DataState(Vec::new());
        let mut values = Vec::with_capacity(self.doc.variables.len());
        for (i, v) in self.doc.variables.iter().enumerate() {
            let val = self.eval().eval_expr(&v.init, &nothing, None, &Env::new())?;
            if !self.schema.ty(i).contains(&val, &self.universe) {
                return Err(EvalError::Typing {
                    var: v.name.clone(),
                    value: self.eval().show(&val),
                }
                .into());
            }
            values.push(val);
        }
        let data = DataState(values);
        let control = match &self.root {
            None => ControlState::Elem,
            Some(root) => control::init(root, &DataGuards { sys: self, data: &data })?,
        };
        Ok(CombinedState { control, data })
    }

    /// Event arguments as values, checked against the parameter sorts.
    pub fn event_args(&self, event: &Event) -> Result<Vec<Value>, EngineError> {
        let def = self
            .event_def(&event.label)
            .ok_or_else(|| EngineError::UnknownEvent(event.label.clone()))?;
        if def.params.len() != event.args.len() {
            return Err(EngineError::BadArgument {
                event: event.to_string(),
                reason: format!("expected {} argument(s)", def.params.len()),
            });
        }
        def.params
            .iter()
            .zip(&event.args)
            .map(|(p, a)| match self.universe.atom(a) {
                Some(atom) if self.universe.sort_name(atom.sort) == p.sort => Ok(Value::Atom(atom)),
                _ => Err(EngineError::BadArgument {
                    event: event.to_string(),
                    reason: format!("`{a}` is not an element of {}", p.sort),
                }),
            })
            .collect()
    }

    /// Control successors only, with data guards read from `data`.
    pub fn control_successors(
        &self,
        control: &ControlState,
        data: &DataState,
        event: &Event,
    ) -> Result<BTreeSet<ControlState>, EngineError> {
        match &self.root {
            None => Ok(BTreeSet::from([control.clone()])),
            Some(root) => Ok(control::control_step(
                root,
                control,
                event,
                &self.root_env,
                &DataGuards { sys: self, data },
                self.options,
            )?),
        }
    }

    /// Offers `event` to `state`: the control layer must accept and the
    /// data event must fire.
    pub fn combined_step(
        &self,
        state: &CombinedState,
        event: &Event,
    ) -> Result<StepResult, EngineError> {
        self.step_inner(state, event).map_err(|e| EngineError::InState {
            state: self.describe(state),
            event: event.to_string(),
            source: Box::new(e),
        })
    }

    fn step_inner(&self, state: &CombinedState, event: &Event) -> Result<StepResult, EngineError> {
        let args = self.event_args(event)?;
        let refused = |r| StepResult {
            successors: Vec::new(),
            refusal: Some(r),
        };
        let controls = self.control_successors(&state.control, &state.data, event)?;
        if controls.is_empty() {
            return Ok(refused(Refusal::Control));
        }
        let datas: Vec<DataState> = if self.is_pure(&event.label) {
            vec![state.data.clone()]
        } else {
            let def = self.event_def(&event.label).expect("checked by event_args");
            if !self.eval().event_enabled(def, &args, &state.data)? {
                return Ok(refused(Refusal::DataGuard));
            }
            let posts = self.eval().event_fire(def, &args, &state.data)?;
            if posts.is_empty() {
                return Ok(refused(Refusal::Infeasible));
            }
            posts.into_iter().collect()
        };
        let mut successors = Vec::with_capacity(controls.len() * datas.len());
        for c in &controls {
            for d in &datas {
                successors.push(CombinedState {
                    control: c.clone(),
                    data: d.clone(),
                });
            }
        }
        successors.sort();
        Ok(StepResult {
            successors,
            refusal: None,
        })
    }

    /// Does instance `atom` of the root weak synchronisation have to take
    /// part in `label` at `data`? False for labels outside the sync set.
    pub fn sync_required(
        &self,
        label: &str,
        data: &DataState,
        atom: Atom,
    ) -> Result<bool, EngineError> {
        let Some(AstdNode::Quant(q)) = &self.root else {
            return Ok(false);
        };
        if q.kind == QuantKind::Interleave || !q.sync_labels.contains(label) {
            return Ok(false);
        }
        let env = self.root_env.with(q.var.clone(), Value::Atom(atom));
        Ok(DataGuards { sys: self, data }.holds(&q.sync_pred, &env)?)
    }

    pub fn describe_control(&self, control: &ControlState) -> String {
        match &self.root {
            None => String::new(),
            Some(root) => control.describe(root, &|sort| {
                self.universe
                    .atoms_of(sort)
                    .unwrap_or_default()
                    .into_iter()
                    .map(|a| self.universe.atom_name(a).to_string())
                    .collect()
            }),
        }
    }

    /// Variable name and rendered value, in declaration order.
    pub fn describe_data(&self, data: &DataState) -> Vec<(String, String)> {
        self.schema
            .iter()
            .zip(&data.0)
            .map(|((n, _), v)| (n.to_string(), self.eval().show(v)))
            .collect()
    }

    pub fn describe(&self, state: &CombinedState) -> String {
        let vars: Vec<String> = self
            .describe_data(&state.data)
            .into_iter()
            .map(|(n, v)| format!("{n} = {v}"))
            .collect();
        format!("{} | {}", self.describe_control(&state.control), vars.join(", "))
    }
}
