//! Enabled-sets backend: for every label a set of the instances that may
//! perform it. Each operation moves its instance between sets according to
//! rules read off the per-instance control automaton.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::machine::{BSpec, BSubst, Machine, Operation};
use super::{data_machine, TranslateError};
use crate::control::{self, ArgPattern, AstdNode, ControlState, Event, GuardContext, QuantKind};
use crate::data::{Atom, CmpOp, Env, EvalError, Expr, Pred, SetOp, Subst, Type, Universe, Value};
use crate::diag::Diagnostic;
use crate::engine::System;
use crate::refinement::Graph;

/// Sets to update when an instance performs a label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rule {
    pub add: BTreeSet<String>,
    pub remove: BTreeSet<String>,
}

#[derive(Clone, Debug)]
pub struct EnabledSets {
    /// Sort of the instances.
    pub sort: String,
    /// Every label of the ASTD, sorted.
    pub labels: Vec<String>,
    /// Labels enabled for a fresh instance.
    pub initial: BTreeSet<String>,
    /// Update rule of every translated label.
    pub rules: BTreeMap<String, Rule>,
    /// Labels left out, with the reason.
    pub rejected: BTreeMap<String, String>,
    pub spec: BSpec,
}

/// Guards are ignored: the enabled-sets view is about control only.
struct AnyGuard<'a>(&'a Universe);

impl GuardContext for AnyGuard<'_> {
    fn holds(&self, _: &Pred, _: &Env) -> Result<bool, EvalError> {
        Ok(true)
    }

    fn domain(&self, sort: &str) -> Option<Vec<Atom>> {
        self.0.atoms_of(sort)
    }

    fn atom(&self, name: &str) -> Option<Atom> {
        self.0.atom(name)
    }
}

fn set_var(label: &str) -> String {
    format!("{label}_enabled")
}

fn capitalised(label: &str) -> String {
    let mut c = label.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Derives the enabled-set rules of the root quantification's body and
/// emits the corresponding machine. Labels that cannot be expressed this
/// way are reported as warnings and left out.
pub fn translate_enabled_sets(sys: &System) -> Result<(EnabledSets, Vec<Diagnostic>), TranslateError> {
    let doc = &sys.doc;
    let Some(AstdNode::Quant(q)) = &sys.root else {
        return Err(TranslateError::Unsupported(vec![Diagnostic::error(
            doc.span,
            "the enabled-sets backend needs a quantification at the root",
        )]));
    };
    let mut diags = Vec::new();
    let labels: Vec<String> = q.body.labels().into_iter().collect();
    let instance = sys
        .universe
        .atoms_of(&q.domain)
        .and_then(|a| a.first().copied())
        .ok_or_else(|| TranslateError::Machine(format!("empty sort `{}`", q.domain)))?;
    let inst_name = sys.universe.atom_name(instance).to_string();
    let env = Env::new().with(q.var.clone(), Value::Atom(instance));
    let transitions: Vec<_> = q.body.automata().into_iter().flat_map(|a| a.transitions.iter()).collect();

    let mut rejected = BTreeMap::new();
    let mut position = BTreeMap::new();
    let mut events: BTreeMap<String, BTreeSet<Event>> = BTreeMap::new();
    for l in &labels {
        let pats: Vec<_> = transitions.iter().filter(|t| t.event.label == *l).collect();
        for t in &pats {
            let args = t
                .event
                .args
                .iter()
                .map(|a| match a {
                    ArgPattern::Var(_) => inst_name.clone(),
                    ArgPattern::Atom(x) => x.clone(),
                })
                .collect();
            events.entry(l.clone()).or_default().insert(Event {
                label: l.clone(),
                args,
            });
        }
        let arity = doc.event(l).map_or(0, |e| e.def.params.len());
        let pos = (0..arity).find(|&j| {
            pats.iter()
                .all(|t| matches!(&t.event.args[j], ArgPattern::Var(v) if *v == q.var))
        });
        let reason = if q.kind != QuantKind::Interleave && q.sync_labels.contains(l) {
            Some("it is synchronised over all instances".to_string())
        } else if arity != 1 || pos.is_none() {
            Some("its only argument must be the instance".to_string())
        } else {
            None
        };
        match reason {
            Some(r) => {
                diags.push(Diagnostic::warning(q.span, format!("label `{l}` is not translated: {r}")));
                rejected.insert(l.clone(), r);
            }
            None => {
                position.insert(l.clone(), pos.expect("checked"));
                if pats.iter().any(|t| t.guard != Pred::True) {
                    diags.push(Diagnostic::warning(
                        q.span,
                        format!("transition guards of `{l}` are not part of the enabled-sets model"),
                    ));
                }
            }
        }
    }

    // Control states of one instance, guards taken as true.
    let ctx = AnyGuard(&sys.universe);
    let init = control::init(&q.body, &ctx).map_err(crate::engine::EngineError::from)?;
    let mut index: HashMap<ControlState, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut succ: Vec<BTreeMap<String, BTreeSet<usize>>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut here: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (l, evs) in &events {
            for e in evs {
                let next = control::control_step(&q.body, &states[i], e, &env, &ctx, sys.options)
                    .map_err(crate::engine::EngineError::from)?;
                for s in next {
                    let j = *index.entry(s.clone()).or_insert_with(|| {
                        states.push(s);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    here.entry(l.clone()).or_default().insert(j);
                }
            }
        }
        if succ.len() <= i {
            succ.resize(i + 1, BTreeMap::new());
        }
        succ[i] = here;
    }
    succ.resize(states.len(), BTreeMap::new());
    let enabled: Vec<BTreeSet<String>> = succ.iter().map(|m| m.keys().cloned().collect()).collect();

    let mut rules = BTreeMap::new();
    for l in position.keys() {
        let mut afters: BTreeSet<&BTreeSet<String>> = BTreeSet::new();
        let mut before: BTreeSet<String> = BTreeSet::new();
        for (i, m) in succ.iter().enumerate() {
            if let Some(ts) = m.get(l) {
                before.extend(enabled[i].iter().cloned());
                afters.extend(ts.iter().map(|&j| &enabled[j]));
            }
        }
        if afters.len() > 1 {
            let r = "the labels enabled afterwards depend on more than the enabled ones before".to_string();
            diags.push(Diagnostic::warning(q.span, format!("label `{l}` is not translated: {r}")));
            rejected.insert(l.clone(), r);
            continue;
        }
        let add: BTreeSet<String> = afters.into_iter().next().cloned().unwrap_or_default();
        let remove = before.difference(&add).cloned().collect();
        rules.insert(l.clone(), Rule { add, remove });
    }

    let data = data_machine(doc);
    let sort = q.domain.clone();
    let mut m = Machine {
        name: format!("{}_bench", doc.name),
        includes: vec![data.name.clone()],
        ..Default::default()
    };
    for l in &labels {
        m.variables.push((set_var(l), Type::Pow(Box::new(Type::Sort(sort.clone())))));
        let init = if enabled[0].contains(l) {
            Expr::ident(&sort)
        } else {
            Expr::SetLit(Vec::new())
        };
        m.init.push((set_var(l), init));
    }
    let order = doc.events.iter().map(|e| &e.def.label).filter(|l| rules.contains_key(*l));
    for l in order {
        let rule = &rules[l];
        let def = &doc.event(l).expect("declared").def;
        let p = def.params[position[l]].clone();
        let me = || Expr::SetLit(vec![Expr::ident(&p.name)]);
        let mut body: Vec<BSubst> = Vec::new();
        for a in &rule.add {
            body.push(BSubst::Data(Subst::Assign(
                set_var(a),
                Expr::bin(SetOp::Union, Expr::ident(set_var(a)), me()),
            )));
        }
        for r in &rule.remove {
            body.push(BSubst::Data(Subst::Assign(
                set_var(r),
                Expr::bin(SetOp::Diff, Expr::ident(set_var(r)), me()),
            )));
        }
        if !sys.is_pure(l) {
            body.push(BSubst::Call {
                op: format!("{l}_act"),
                args: vec![Expr::ident(&p.name)],
            });
        }
        m.operations.push(Operation {
            name: capitalised(l),
            pre: vec![
                Pred::cmp(CmpOp::In, Expr::ident(&p.name), Expr::ident(&sort)),
                Pred::cmp(CmpOp::In, Expr::ident(&p.name), Expr::ident(set_var(l))),
            ],
            params: vec![p],
            body: BSubst::Par(body),
        });
    }
    let model = EnabledSets {
        sort,
        labels,
        initial: enabled[0].clone(),
        rules,
        rejected,
        spec: BSpec {
            machines: vec![data, m],
        },
    };
    Ok((model, diags))
}

/// Labelled transition system of the enabled-sets model over `instances`.
/// Events are the labels applied to one instance.
pub fn control_lts_of_enabled_sets(model: &EnabledSets, instances: &[String]) -> Graph {
    let init = vec![model.initial.clone(); instances.len()];
    let mut index: HashMap<Vec<BTreeSet<String>>, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (k, inst) in instances.iter().enumerate() {
            for l in states[i][k].clone() {
                let Some(rule) = model.rules.get(&l) else {
                    continue;
                };
                let mut next = states[i].clone();
                next[k] = next[k].difference(&rule.remove).cloned().collect();
                next[k].extend(rule.add.iter().cloned());
                let j = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                edges.push((i, Some(Event::new(l.as_str(), &[inst.as_str()])), j));
            }
        }
    }
    Graph {
        states: states.len(),
        initial: 0,
        edges,
    }
}

/// The ASTD alone: control states reachable when every guard is taken to
/// hold, over the system's whole alphabet.
pub fn control_graph(sys: &System) -> Result<Graph, TranslateError> {
    let ctx = AnyGuard(&sys.universe);
    let Some(root) = &sys.root else {
        let edges = sys.alphabet().iter().map(|e| (0, Some(e.clone()), 0)).collect();
        return Ok(Graph {
            states: 1,
            initial: 0,
            edges,
        });
    };
    let init = control::init(root, &ctx).map_err(crate::engine::EngineError::from)?;
    let mut index: HashMap<ControlState, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for e in sys.alphabet() {
            let next = control::control_step(root, &states[i], e, &sys.root_env, &ctx, sys.options)
                .map_err(crate::engine::EngineError::from)?;
            for s in next {
                let j = *index.entry(s.clone()).or_insert_with(|| {
                    states.push(s);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                edges.push((i, Some(e.clone()), j));
            }
        }
    }
    Ok(Graph {
        states: states.len(),
        initial: 0,
        edges,
    })
}
