//! A small evaluator for generated machines, used to check that a
//! translation behaves like the ASTD it came from.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::machine::{BSpec, BSubst, Operation};
use super::state::StateEncoding;
use super::TranslateError;
use crate::control::Event;
use crate::data::{DataState, Env, EvalCtx, EvalError, Schema, Universe, Value};
use crate::engine::{explore, Bounds, System};

/// Executes the operations of the last machine of a [`BSpec`] over the
/// variables of all its machines.
pub struct Interpreter<'a> {
    spec: &'a BSpec,
    universe: Universe,
    schema: Schema,
    constants: HashMap<String, Value>,
}

/// Reachable states of a machine; edges carry the operation call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BLts {
    pub states: Vec<DataState>,
    pub initial: usize,
    pub edges: Vec<(usize, Event, usize)>,
    pub truncated: bool,
}

impl<'a> Interpreter<'a> {
    pub fn new(spec: &'a BSpec) -> Result<Self, TranslateError> {
        let mut universe = Universe::new();
        for m in &spec.machines {
            for (name, elems) in &m.sets {
                universe
                    .add_sort(name, elems)
                    .map_err(|e| TranslateError::Machine(format!("{}: {e}", m.name)))?;
            }
        }
        let mut constants = HashMap::new();
        let empty = Schema::default();
        for m in &spec.machines {
            for (name, e) in &m.constants {
                let v = EvalCtx::new(&universe, &empty, &constants).eval_expr(
                    e,
                    &DataState(Vec::new()),
                    None,
                    &Env::new(),
                )?;
                constants.insert(name.clone(), v);
            }
        }
        let schema = Schema::new(
            spec.machines
                .iter()
                .flat_map(|m| m.variables.iter().cloned())
                .collect(),
        );
        Ok(Interpreter {
            spec,
            universe,
            schema,
            constants,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    fn ctx(&self) -> EvalCtx<'_> {
        EvalCtx::new(&self.universe, &self.schema, &self.constants)
    }

    pub fn initial(&self) -> Result<DataState, TranslateError> {
        let nothing = DataState(Vec::new());
        let mut values = Vec::with_capacity(self.schema.len());
        for (name, ty) in self.schema.iter() {
            let e = self
                .spec
                .machines
                .iter()
                .find_map(|m| m.init.iter().find(|(n, _)| n == name).map(|(_, e)| e))
                .ok_or_else(|| TranslateError::Machine(format!("`{name}` is not initialised")))?;
            let v = self.ctx().eval_expr(e, &nothing, None, &Env::new())?;
            if !ty.contains(&v, &self.universe) {
                return Err(EvalError::Typing {
                    var: name.to_string(),
                    value: self.ctx().show(&v),
                }
                .into());
            }
            values.push(v);
        }
        Ok(DataState(values))
    }

    /// Every operation of the main machine with every well-sorted argument
    /// tuple.
    pub fn events(&self) -> Result<Vec<Event>, TranslateError> {
        let mut out = Vec::new();
        for op in &self.spec.main().operations {
            let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
            for p in &op.params {
                let atoms = self
                    .universe
                    .atoms_of(&p.sort)
                    .ok_or_else(|| TranslateError::Machine(format!("unknown set `{}`", p.sort)))?;
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        atoms.iter().map(move |a| {
                            let mut t = t.clone();
                            t.push(self.universe.atom_name(*a).to_string());
                            t
                        })
                    })
                    .collect();
            }
            out.extend(tuples.into_iter().map(|args| Event {
                label: op.name.clone(),
                args,
            }));
        }
        Ok(out)
    }

    fn bind(&self, op: &Operation, args: &[Value]) -> Env {
        let mut env = Env::new();
        for (p, a) in op.params.iter().zip(args) {
            env.bind(p.name.clone(), a.clone());
        }
        env
    }

    /// After-states of calling `op` with `args`; empty when the
    /// precondition fails or no branch applies.
    fn call(
        &self,
        op: &Operation,
        args: &[Value],
        state: &DataState,
    ) -> Result<BTreeSet<DataState>, TranslateError> {
        let mut env = self.bind(op, args);
        for p in &op.pre {
            if !self.ctx().eval_pred(p, state, None, &mut env)? {
                return Ok(BTreeSet::new());
            }
        }
        self.exec(&op.body, state, &mut env)
    }

    pub fn step(&self, state: &DataState, event: &Event) -> Result<BTreeSet<DataState>, TranslateError> {
        let op = self
            .spec
            .main()
            .operation(&event.label)
            .ok_or_else(|| TranslateError::Machine(format!("no operation `{}`", event.label)))?;
        let mut args = Vec::with_capacity(event.args.len());
        for a in &event.args {
            let atom = self
                .universe
                .atom(a)
                .ok_or_else(|| TranslateError::Machine(format!("unknown element `{a}`")))?;
            args.push(Value::Atom(atom));
        }
        self.call(op, &args, state)
    }

    fn exec(
        &self,
        s: &BSubst,
        pre: &DataState,
        env: &mut Env,
    ) -> Result<BTreeSet<DataState>, TranslateError> {
        match s {
            BSubst::Data(d) => Ok(self.ctx().apply_subst(d, pre, env)?),
            BSubst::Call { op, args } => {
                let callee = self
                    .spec
                    .operation(op)
                    .ok_or_else(|| TranslateError::Machine(format!("no operation `{op}`")))?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.ctx().eval_expr(a, pre, None, env)?);
                }
                self.call(callee, &vals, pre)
            }
            BSubst::Select(branches) => {
                let mut out = BTreeSet::new();
                for (g, b) in branches {
                    if self.ctx().eval_pred(g, pre, None, env)? {
                        out.extend(self.exec(b, pre, env)?);
                    }
                }
                Ok(out)
            }
            BSubst::Any {
                var,
                sort,
                pred,
                body,
            } => {
                let atoms = self
                    .universe
                    .atoms_of(sort)
                    .ok_or_else(|| TranslateError::Machine(format!("unknown set `{sort}`")))?;
                let mut out = BTreeSet::new();
                for a in atoms {
                    let mut inner = env.with(var.clone(), Value::Atom(a));
                    if self.ctx().eval_pred(pred, pre, None, &mut inner)? {
                        out.extend(self.exec(body, pre, &mut inner)?);
                    }
                }
                Ok(out)
            }
            BSubst::Par(items) => {
                // Each component contributes the variables it changed.
                let mut acc: Vec<Vec<Option<Value>>> = vec![vec![None; pre.0.len()]];
                for it in items {
                    let posts = self.exec(it, pre, env)?;
                    let mut next = Vec::with_capacity(acc.len() * posts.len());
                    for changes in &acc {
                        for post in &posts {
                            let mut c = changes.clone();
                            for (i, v) in post.0.iter().enumerate() {
                                if *v == pre.0[i] {
                                    continue;
                                }
                                match &c[i] {
                                    Some(old) if old != v => {
                                        return Err(EvalError::WriteConflict(
                                            self.schema.name(i).to_string(),
                                        )
                                        .into())
                                    }
                                    _ => c[i] = Some(v.clone()),
                                }
                            }
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                Ok(acc
                    .into_iter()
                    .map(|c| {
                        DataState(
                            c.into_iter()
                                .zip(&pre.0)
                                .map(|(n, old)| n.unwrap_or_else(|| old.clone()))
                                .collect(),
                        )
                    })
                    .collect())
            }
        }
    }

    /// Breadth-first exploration, stopping after `max_states` states.
    pub fn explore(&self, max_states: usize) -> Result<BLts, TranslateError> {
        let events = self.events()?;
        let init = self.initial()?;
        let mut index: HashMap<DataState, usize> = HashMap::from([(init.clone(), 0)]);
        let mut lts = BLts {
            states: vec![init],
            initial: 0,
            edges: Vec::new(),
            truncated: false,
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for e in &events {
                let posts = self.step(&lts.states[i].clone(), e)?;
                for p in posts {
                    let j = match index.get(&p) {
                        Some(&j) => j,
                        None => {
                            if lts.states.len() >= max_states {
                                lts.truncated = true;
                                continue;
                            }
                            let j = lts.states.len();
                            index.insert(p.clone(), j);
                            lts.states.push(p);
                            queue.push_back(j);
                            j
                        }
                    };
                    lts.edges.push((i, e.clone(), j));
                }
            }
        }
        Ok(lts)
    }
}

/// Outcome of comparing the engine's state space with the generated
/// machine's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fidelity {
    pub engine_states: usize,
    pub engine_edges: usize,
    pub machine_states: usize,
    pub machine_edges: usize,
    /// First difference found, if any.
    pub mismatch: Option<String>,
}

impl Fidelity {
    pub fn isomorphic(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn rebase(v: &Value, from: &Universe, to: &Universe) -> Option<Value> {
    Some(match v {
        Value::Atom(a) => Value::Atom(to.atom(from.atom_name(*a))?),
        Value::Bool(b) => Value::Bool(*b),
        Value::Pair(a, b) => Value::pair(rebase(a, from, to)?, rebase(b, from, to)?),
        Value::Set(s) => Value::Set(s.iter().map(|x| rebase(x, from, to)).collect::<Option<_>>()?),
    })
}

/// Explores both the system and its state encoding and checks that the
/// encoding of engine states is a bijection preserving labelled edges.
pub fn check_fidelity(
    sys: &System,
    enc: &StateEncoding,
    bounds: Bounds,
) -> Result<Fidelity, TranslateError> {
    let lts = explore(sys, bounds)?;
    let interp = Interpreter::new(&enc.spec)?;
    let blts = interp.explore(bounds.max_states)?;
    let mut report = Fidelity {
        engine_states: lts.states.len(),
        engine_edges: lts.edges.len(),
        machine_states: blts.states.len(),
        machine_edges: blts.edges.len(),
        mismatch: None,
    };
    if lts.truncated || blts.truncated {
        report.mismatch = Some("a state space is truncated".into());
        return Ok(report);
    }
    let index: HashMap<&DataState, usize> = blts.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut image = Vec::with_capacity(lts.states.len());
    for (i, s) in lts.states.iter().enumerate() {
        let mut values = Vec::with_capacity(interp.schema().len());
        for v in &s.data.0 {
            values.push(rebase(v, &sys.universe, interp.universe()).ok_or_else(|| {
                TranslateError::Machine("data value outside the machine's sets".into())
            })?);
        }
        let Some(ctl) = enc.encode(&s.control, interp.universe()) else {
            report.mismatch = Some(format!("state {i} has no encoding"));
            return Ok(report);
        };
        values.extend(ctl);
        match index.get(&DataState(values)) {
            Some(&j) => image.push(j),
            None => {
                report.mismatch = Some(format!(
                    "engine state {} is not reachable in the machine",
                    sys.describe(s)
                ));
                return Ok(report);
            }
        }
    }
    if image.iter().collect::<BTreeSet<_>>().len() != image.len() || image.len() != blts.states.len() {
        report.mismatch = Some("state encoding is not a bijection".into());
        return Ok(report);
    }
    if image[lts.initial] != blts.initial {
        report.mismatch = Some("initial states differ".into());
        return Ok(report);
    }
    let mapped: BTreeSet<(usize, Event, usize)> = lts
        .edges
        .iter()
        .map(|e| (image[e.from], lts.alphabet[e.event].clone(), image[e.to]))
        .collect();
    let machine: BTreeSet<(usize, Event, usize)> = blts.edges.iter().cloned().collect();
    if let Some((a, e, b)) = mapped.symmetric_difference(&machine).next() {
        let side = if mapped.contains(&(*a, e.clone(), *b)) { "engine" } else { "machine" };
        report.mismatch = Some(format!("{e} from machine state {a} to {b} exists only in the {side}"));
    }
    Ok(report)
}
