use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{ArgPattern, Arrow, AstdNode, Automaton, EventPattern, Quant};
use super::state::{ControlState, Event};
use crate::data::{Atom, Env, EvalError, Pred, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("state does not match the structure of `{0}`")]
    Shape(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("automaton `{automaton}` has no state `{state}`")]
    UnknownState { automaton: String, state: String },
    #[error("pattern variable `{0}` is not bound")]
    UnboundPattern(String),
}

/// What the control layer needs from its surroundings: guard evaluation
/// and the carrier sets of quantification domains.
pub trait GuardContext {
    fn holds(&self, pred: &Pred, env: &Env) -> Result<bool, EvalError>;
    fn domain(&self, sort: &str) -> Option<Vec<Atom>>;
    fn atom(&self, name: &str) -> Option<Atom>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepOptions {
    /// Under weak synchronisation, instances outside the sync predicate
    /// stay put instead of optionally moving.
    pub weak_sync_strict: bool,
}

pub fn init(node: &AstdNode, ctx: &dyn GuardContext) -> Result<ControlState, ControlError> {
    match node {
        AstdNode::Elem => Ok(ControlState::Elem),
        AstdNode::Automaton(a) => {
            let i = index(a, &a.init)?;
            Ok(ControlState::aut(i, init(&a.states[i].1, ctx)?))
        }
        AstdNode::Kleene(b) => Ok(ControlState::kleene(false, init(b, ctx)?)),
        AstdNode::Quant(q) => {
            let n = domain(q, ctx)?.len();
            let s = init(&q.body, ctx)?;
            Ok(ControlState::Quant(vec![s; n]))
        }
    }
}

pub fn is_final(node: &AstdNode, state: &ControlState) -> Result<bool, ControlError> {
    match (node, state) {
        (AstdNode::Elem, ControlState::Elem) => Ok(true),
        (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => {
            let (name, n) = a
                .states
                .get(*current)
                .ok_or_else(|| ControlError::Shape(a.name.clone()))?;
            if !a.finals.contains(name) {
                return Ok(false);
            }
            if n.is_elem() {
                Ok(true)
            } else {
                is_final(n, sub)
            }
        }
        (AstdNode::Kleene(b), ControlState::Kleene { started, sub }) => {
            Ok(!*started || is_final(b, sub)?)
        }
        (AstdNode::Quant(q), ControlState::Quant(f)) => {
            for s in f {
                if !is_final(&q.body, s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(ControlError::Shape(node_name(node))),
    }
}

/// Does `event` instantiate `pattern` under the quantification bindings?
pub fn matches(
    pattern: &EventPattern,
    event: &Event,
    env: &Env,
    ctx: &dyn GuardContext,
) -> Result<bool, ControlError> {
    if pattern.label != event.label || pattern.args.len() != event.args.len() {
        return Ok(false);
    }
    for (p, a) in pattern.args.iter().zip(&event.args) {
        let ok = match p {
            ArgPattern::Atom(name) => name == a,
            ArgPattern::Var(x) => {
                let bound = env
                    .get(x)
                    .ok_or_else(|| ControlError::UnboundPattern(x.clone()))?;
                match ctx.atom(a) {
                    Some(atom) => *bound == Value::Atom(atom),
                    None => false,
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All control successors of `state` on `event`. An empty set means the
/// control layer refuses the event.
pub fn control_step(
    node: &AstdNode,
    state: &ControlState,
    event: &Event,
    env: &Env,
    ctx: &dyn GuardContext,
    opts: StepOptions,
) -> Result<BTreeSet<ControlState>, ControlError> {
    let mut out = BTreeSet::new();
    match (node, state) {
        (AstdNode::Elem, ControlState::Elem) => {}
        (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => {
            step_automaton(a, *current, sub, event, env, ctx, opts, &mut out)?
        }
        (AstdNode::Kleene(b), ControlState::Kleene { started, sub }) => {
            if !*started || is_final(b, sub)? {
                let fresh = init(b, ctx)?;
                for s in control_step(b, &fresh, event, env, ctx, opts)? {
                    out.insert(ControlState::kleene(true, s));
                }
            }
            if *started {
                for s in control_step(b, sub, event, env, ctx, opts)? {
                    out.insert(ControlState::kleene(true, s));
                }
            }
        }
        (AstdNode::Quant(q), ControlState::Quant(f)) => {
            step_quant(q, f, event, env, ctx, opts, &mut out)?
        }
        _ => return Err(ControlError::Shape(node_name(node))),
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn step_automaton(
    a: &Automaton,
    current: usize,
    sub: &ControlState,
    event: &Event,
    env: &Env,
    ctx: &dyn GuardContext,
    opts: StepOptions,
    out: &mut BTreeSet<ControlState>,
) -> Result<(), ControlError> {
    let (cur_name, cur_node) = &a.states[current];
    for t in &a.transitions {
        if t.event.label != event.label || t.arrow.source() != cur_name {
            continue;
        }
        // A source substate constrains the substate we are in.
        let from_sub_node = match &t.arrow {
            Arrow::FromSub { from_sub, .. } => match (cur_node, sub) {
                (AstdNode::Automaton(b), ControlState::Aut { current: c2, sub: s2 }) => {
                    if b.states[*c2].0 != *from_sub {
                        continue;
                    }
                    Some((&b.states[*c2].1, &**s2))
                }
                _ => {
                    return Err(ControlError::UnknownState {
                        automaton: cur_name.clone(),
                        state: from_sub.clone(),
                    })
                }
            },
            _ => None,
        };
        if !matches(&t.event, event, env, ctx)? {
            continue;
        }
        if !ctx.holds(&t.guard, env)? {
            continue;
        }
        if t.final_flag {
            let fin = match from_sub_node {
                Some((n, s)) => n.is_elem() || is_final(n, s)?,
                None => cur_node.is_elem() || is_final(cur_node, sub)?,
            };
            if !fin {
                continue;
            }
        }
        let to = index(a, t.arrow.target())?;
        let target = &a.states[to].1;
        let entered = match &t.arrow {
            Arrow::ToSub { to_sub, .. } => match target {
                AstdNode::Automaton(b) => {
                    let j = index(b, to_sub)?;
                    ControlState::aut(j, init(&b.states[j].1, ctx)?)
                }
                _ => {
                    return Err(ControlError::UnknownState {
                        automaton: a.states[to].0.clone(),
                        state: to_sub.clone(),
                    })
                }
            },
            _ => init(target, ctx)?,
        };
        out.insert(ControlState::aut(to, entered));
    }
    if !cur_node.is_elem() {
        for s in control_step(cur_node, sub, event, env, ctx, opts)? {
            out.insert(ControlState::aut(current, s));
        }
    }
    Ok(())
}

fn step_quant(
    q: &Quant,
    f: &[ControlState],
    event: &Event,
    env: &Env,
    ctx: &dyn GuardContext,
    opts: StepOptions,
    out: &mut BTreeSet<ControlState>,
) -> Result<(), ControlError> {
    let atoms = domain(q, ctx)?;
    if atoms.len() != f.len() {
        return Err(ControlError::Shape(format!("quantification over {}", q.domain)));
    }
    if !q.sync_labels.contains(&event.label) {
        for (i, a) in atoms.iter().enumerate() {
            let inner = env.with(q.var.clone(), Value::Atom(*a));
            for s in control_step(&q.body, &f[i], event, &inner, ctx, opts)? {
                let mut g = f.to_vec();
                g[i] = s;
                out.insert(ControlState::Quant(g));
            }
        }
        return Ok(());
    }
    let mut options: Vec<Vec<ControlState>> = Vec::with_capacity(f.len());
    for (i, a) in atoms.iter().enumerate() {
        let inner = env.with(q.var.clone(), Value::Atom(*a));
        let required = ctx.holds(&q.sync_pred, &inner)?;
        let steps = control_step(&q.body, &f[i], event, &inner, ctx, opts)?;
        if required {
            if steps.is_empty() {
                return Ok(());
            }
            options.push(steps.into_iter().collect());
        } else {
            let mut o = vec![f[i].clone()];
            if !opts.weak_sync_strict {
                o.extend(steps.into_iter().filter(|s| s != &f[i]));
            }
            options.push(o);
        }
    }
    let mut acc: Vec<Vec<ControlState>> = vec![Vec::new()];
    for o in options {
        let mut next = Vec::with_capacity(acc.len() * o.len());
        for prefix in &acc {
            for s in &o {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    out.extend(acc.into_iter().map(ControlState::Quant));
    Ok(())
}

fn index(a: &Automaton, name: &str) -> Result<usize, ControlError> {
    a.state_index(name).ok_or_else(|| ControlError::UnknownState {
        automaton: a.name.clone(),
        state: name.to_string(),
    })
}

fn domain(q: &Quant, ctx: &dyn GuardContext) -> Result<Vec<Atom>, ControlError> {
    ctx.domain(&q.domain)
        .ok_or_else(|| ControlError::UnknownSort(q.domain.clone()))
}

fn node_name(node: &AstdNode) -> String {
    match node {
        AstdNode::Elem => "elem".into(),
        AstdNode::Automaton(a) => a.name.clone(),
        AstdNode::Kleene(_) => "closure".into(),
        AstdNode::Quant(q) => format!("quantification over {}", q.domain),
    }
}
