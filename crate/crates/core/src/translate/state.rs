//! State-encoding backend: one B variable per automaton holding its
//! current state and one boolean per closure telling whether it started.
//!
//! Substates of inactive states always hold their initial values: leaving
//! a state resets its body, so a ground control state has exactly one
//! encoding.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::machine::{BSpec, BSubst, Machine, Operation};
use super::{data_machine, TranslateError};
use crate::control::{ArgPattern, Arrow, AstdNode, Automaton, ControlState, EventPattern, QuantKind};
use crate::data::{CmpOp, Expr, Param, Pred, Subst, Type, Universe, Value};
use crate::diag::{Diagnostic, Span};
use crate::spec_lang::{SpecDoc, OPT_WEAK_SYNC_STRICT};

/// A control variable of the generated machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtlVar {
    pub name: String,
    /// Enumerated set of an automaton's states; `None` for a boolean.
    pub set: Option<(String, Vec<String>)>,
    pub init: Expr,
}

/// The generated machines plus what is needed to map ASTD control states
/// onto their encoding.
#[derive(Clone, Debug)]
pub struct StateEncoding {
    pub spec: BSpec,
    pub vars: Vec<CtlVar>,
    /// Quantification variable and sort of a root quantification.
    pub quant: Option<(String, String)>,
    root: Option<AstdNode>,
    state_var: HashMap<String, String>,
    started_var: HashMap<String, String>,
    atoms: HashMap<(String, String), String>,
    domain: Vec<String>,
}

/// B identifier for a state name: dots become underscores and a leading
/// digit gets an `S` prefix, so `2.1` becomes `S2_1`.
pub fn state_ident(name: &str) -> String {
    let body = name.replace('.', "_");
    if body.starts_with(|c: char| c.is_ascii_digit()) {
        format!("S{body}")
    } else {
        body
    }
}

#[derive(Clone, Debug, Default)]
struct Branch {
    conds: Vec<Pred>,
    writes: BTreeMap<String, Expr>,
}

impl Branch {
    fn guarded(mut self, c: Option<Pred>) -> Branch {
        if let Some(c) = c {
            self.conds.insert(0, c);
        }
        self
    }
}

struct Gen<'a> {
    enc: &'a StateEncoding,
    /// Quantification variable, when the root is a quantification.
    index: Option<String>,
    /// Argument expressions of the operation being generated.
    params: Vec<Expr>,
    label: String,
}

fn unsupported(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(span, msg)
}

impl Gen<'_> {
    fn at(&self, var: &str) -> Expr {
        match &self.index {
            Some(t) => Expr::app(Expr::ident(var), Expr::ident(t)),
            None => Expr::ident(var),
        }
    }

    fn is(&self, var: &str, value: Expr) -> Pred {
        Pred::cmp(CmpOp::Eq, self.at(var), value)
    }

    fn atom(&self, aut: &Automaton, state: &str) -> Expr {
        Expr::ident(self.enc.atoms[&(aut.name.clone(), state.to_string())].clone())
    }

    fn state_var(&self, aut: &Automaton) -> &str {
        &self.enc.state_var[&aut.name]
    }

    fn pattern_conds(&self, p: &EventPattern) -> Vec<Pred> {
        let mut out = Vec::new();
        for (j, a) in p.args.iter().enumerate() {
            let want = match a {
                ArgPattern::Var(v) => Expr::ident(v),
                ArgPattern::Atom(x) => Expr::ident(x),
            };
            if self.params[j] != want {
                out.push(Pred::cmp(CmpOp::Eq, self.params[j].clone(), want));
            }
        }
        out
    }

    /// Writes putting every variable below `node` back to its initial value.
    fn reset(&self, node: &AstdNode, out: &mut BTreeMap<String, Expr>) {
        match node {
            AstdNode::Elem | AstdNode::Quant(_) => {}
            AstdNode::Automaton(a) => {
                out.insert(self.state_var(a).to_string(), self.atom(a, &a.init));
                for (_, n) in &a.states {
                    self.reset(n, out);
                }
            }
            AstdNode::Kleene(b) => {
                if let AstdNode::Automaton(a) = &**b {
                    out.insert(self.enc.started_var[&a.name].clone(), Expr::Bool(false));
                }
                self.reset(b, out);
            }
        }
    }

    /// Finality of `node`; with `fresh` the node is known to be in its
    /// initial configuration.
    fn final_cond(&self, node: &AstdNode, fresh: bool) -> Pred {
        match node {
            AstdNode::Elem | AstdNode::Quant(_) => Pred::True,
            AstdNode::Automaton(a) => {
                let mut alts = Vec::new();
                for (name, n) in &a.states {
                    if !a.finals.contains(name) || (fresh && *name != a.init) {
                        continue;
                    }
                    let here = if fresh {
                        Pred::True
                    } else {
                        self.is(self.state_var(a), self.atom(a, name))
                    };
                    let sub = if n.is_elem() { Pred::True } else { self.final_cond(n, fresh) };
                    alts.push(Pred::and(here, sub));
                }
                Pred::disj(alts)
            }
            AstdNode::Kleene(b) => {
                if fresh {
                    return Pred::True;
                }
                let AstdNode::Automaton(a) = &**b else {
                    return Pred::True;
                };
                let not_started = self.is(&self.enc.started_var[&a.name], Expr::Bool(false));
                Pred::or(not_started, self.final_cond(b, false))
            }
        }
    }

    fn gen(&self, node: &AstdNode, fresh: bool) -> Vec<Branch> {
        match node {
            AstdNode::Elem | AstdNode::Quant(_) => Vec::new(),
            AstdNode::Automaton(a) => self.gen_aut(a, fresh),
            AstdNode::Kleene(b) => {
                let AstdNode::Automaton(a) = &**b else {
                    return Vec::new();
                };
                let started = self.enc.started_var[&a.name].clone();
                let mut out: Vec<Branch> = self
                    .gen(b, fresh)
                    .into_iter()
                    .map(|mut br| {
                        br.writes.insert(started.clone(), Expr::Bool(true));
                        br
                    })
                    .collect();
                if !fresh {
                    // Restart from a final body: reset, then step from the
                    // initial configuration.
                    let fin = self.final_cond(b, false);
                    if fin != Pred::False {
                        let cond = Pred::and(self.is(&started, Expr::Bool(true)), fin);
                        for br in self.gen(b, true) {
                            let mut writes = BTreeMap::new();
                            self.reset(b, &mut writes);
                            writes.insert(started.clone(), Expr::Bool(true));
                            writes.extend(br.writes);
                            let mut conds: Vec<Pred> = cond.conjuncts().into_iter().cloned().collect();
                            conds.extend(br.conds);
                            out.push(Branch { conds, writes });
                        }
                    }
                }
                out
            }
        }
    }

    fn gen_aut(&self, a: &Automaton, fresh: bool) -> Vec<Branch> {
        let var = self.state_var(a).to_string();
        let mut out = Vec::new();
        for (cname, cnode) in &a.states {
            if fresh && *cname != a.init {
                continue;
            }
            let here = (!fresh).then(|| self.is(&var, self.atom(a, cname)));
            for t in &a.transitions {
                if t.event.label != self.label || t.arrow.source() != cname {
                    continue;
                }
                let mut br = Branch::default();
                if let Some(h) = &here {
                    br.conds.push(h.clone());
                }
                let mut fin_node = cnode;
                if let Arrow::FromSub { from_sub, .. } = &t.arrow {
                    let AstdNode::Automaton(b) = cnode else { continue };
                    if fresh {
                        if *from_sub != b.init {
                            continue;
                        }
                    } else {
                        br.conds.push(self.is(self.state_var(b), self.atom(b, from_sub)));
                    }
                    fin_node = b.state_node(from_sub).expect("checked state");
                }
                br.conds.extend(self.pattern_conds(&t.event));
                if t.guard != Pred::True {
                    br.conds.push(t.guard.clone());
                }
                if t.final_flag && !fin_node.is_elem() {
                    match self.final_cond(fin_node, fresh) {
                        Pred::False => continue,
                        Pred::True => {}
                        c => br.conds.push(c),
                    }
                }
                self.reset(cnode, &mut br.writes);
                let target = t.arrow.target();
                br.writes.insert(var.clone(), self.atom(a, target));
                if let Arrow::ToSub { to_sub, .. } = &t.arrow {
                    if let Some(AstdNode::Automaton(b)) = a.state_node(target) {
                        br.writes.insert(self.state_var(b).to_string(), self.atom(b, to_sub));
                    }
                }
                out.push(br);
            }
            if !cnode.is_elem() {
                out.extend(self.gen(cnode, fresh).into_iter().map(|b| b.guarded(here.clone())));
            }
        }
        out
    }
}

/// Two branches are exclusive when they test one variable against two
/// different values.
fn exclusive(a: &Branch, b: &Branch) -> bool {
    let tests = |br: &Branch| -> Vec<(Expr, Expr)> {
        br.conds
            .iter()
            .filter_map(|c| match c {
                Pred::Cmp(CmpOp::Eq, l, r @ (Expr::Ident(_) | Expr::Bool(_))) => {
                    Some((l.clone(), r.clone()))
                }
                _ => None,
            })
            .collect()
    };
    let tb = tests(b);
    tests(a)
        .iter()
        .any(|(l, r)| tb.iter().any(|(l2, r2)| l == l2 && r != r2))
}

impl StateEncoding {
    fn layout(doc: &SpecDoc) -> Result<StateEncoding, Vec<Diagnostic>> {
        let mut enc = StateEncoding {
            spec: BSpec::default(),
            vars: Vec::new(),
            quant: None,
            root: doc.astd.clone(),
            state_var: HashMap::new(),
            started_var: HashMap::new(),
            atoms: HashMap::new(),
            domain: Vec::new(),
        };
        let mut diags = Vec::new();
        let body = match &doc.astd {
            None => return Ok(enc),
            Some(AstdNode::Quant(q)) => {
                enc.quant = Some((q.var.clone(), q.domain.clone()));
                enc.domain = doc.sort(&q.domain).map(|s| s.elements.clone()).unwrap_or_default();
                &*q.body
            }
            Some(n) => n,
        };
        enc.collect(body, doc.span, &mut diags);
        if diags.is_empty() {
            Ok(enc)
        } else {
            Err(diags)
        }
    }

    fn collect(&mut self, node: &AstdNode, span: Span, diags: &mut Vec<Diagnostic>) {
        match node {
            AstdNode::Elem => {}
            AstdNode::Quant(q) => diags.push(unsupported(
                q.span,
                "quantification below the root is not supported by the state encoding",
            )),
            AstdNode::Kleene(b) => match &**b {
                AstdNode::Automaton(a) => {
                    let name = format!("Started_{}", a.name);
                    self.started_var.insert(a.name.clone(), name.clone());
                    self.collect(b, span, diags);
                    self.vars.push(CtlVar {
                        name,
                        set: None,
                        init: Expr::Bool(false),
                    });
                }
                _ => diags.push(unsupported(
                    span,
                    "the state encoding needs an automaton directly under a closure",
                )),
            },
            AstdNode::Automaton(a) => {
                if self.state_var.contains_key(&a.name) {
                    diags.push(unsupported(a.span, format!("automaton name `{}` is used twice", a.name)));
                    return;
                }
                let var = format!("State_{}", a.name);
                self.state_var.insert(a.name.clone(), var.clone());
                let elems: Vec<String> = a.states.iter().map(|(n, _)| state_ident(n)).collect();
                for ((n, _), e) in a.states.iter().zip(&elems) {
                    self.atoms.insert((a.name.clone(), n.clone()), e.clone());
                }
                self.vars.push(CtlVar {
                    name: var,
                    set: Some((format!("{}_STATES", a.name), elems)),
                    init: Expr::ident(state_ident(&a.init)),
                });
                for (_, n) in &a.states {
                    self.collect(n, a.span, diags);
                }
            }
        }
    }

    fn var_type(&self, v: &CtlVar) -> Type {
        let range = match &v.set {
            Some((set, _)) => Type::Sort(set.clone()),
            None => Type::Bool,
        };
        match &self.quant {
            Some((_, d)) => Type::TFun(Box::new(Type::Sort(d.clone())), Box::new(range)),
            None => range,
        }
    }

    fn var_init(&self, v: &CtlVar) -> Expr {
        match &self.quant {
            Some((_, d)) => Expr::bin(
                crate::data::SetOp::Product,
                Expr::ident(d),
                Expr::SetLit(vec![v.init.clone()]),
            ),
            None => v.init.clone(),
        }
    }

    /// Control-variable values encoding `state`, in [`StateEncoding::vars`]
    /// order, as values of `universe` (which must know the generated sets).
    pub fn encode(&self, state: &ControlState, universe: &Universe) -> Option<Vec<Value>> {
        let atom = |n: &str| universe.atom(n).map(Value::Atom);
        let body = match &self.root {
            None => return Some(Vec::new()),
            Some(AstdNode::Quant(q)) => &*q.body,
            Some(n) => n,
        };
        let mut per_instance: Vec<BTreeMap<String, Value>> = Vec::new();
        let states: Vec<&ControlState> = match (&self.quant, state) {
            (Some(_), ControlState::Quant(f)) => f.iter().collect(),
            (None, s) => vec![s],
            _ => return None,
        };
        for s in states {
            let mut vals = BTreeMap::new();
            for v in &self.vars {
                let init = match &v.init {
                    Expr::Bool(b) => Value::Bool(*b),
                    Expr::Ident(n) => atom(n)?,
                    _ => return None,
                };
                vals.insert(v.name.clone(), init);
            }
            self.walk(body, s, universe, &mut vals)?;
            per_instance.push(vals);
        }
        let mut out = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            match &self.quant {
                None => out.push(per_instance[0][&v.name].clone()),
                Some(_) => {
                    let mut pairs = BTreeSet::new();
                    for (inst, vals) in self.domain.iter().zip(&per_instance) {
                        pairs.insert(Value::pair(atom(inst)?, vals[&v.name].clone()));
                    }
                    out.push(Value::Set(pairs));
                }
            }
        }
        Some(out)
    }

    fn walk(
        &self,
        node: &AstdNode,
        state: &ControlState,
        universe: &Universe,
        vals: &mut BTreeMap<String, Value>,
    ) -> Option<()> {
        match (node, state) {
            (AstdNode::Elem, _) => Some(()),
            (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => {
                let (name, n) = a.states.get(*current)?;
                let id = &self.atoms[&(a.name.clone(), name.clone())];
                vals.insert(self.state_var[&a.name].clone(), Value::Atom(universe.atom(id)?));
                self.walk(n, sub, universe, vals)
            }
            (AstdNode::Kleene(b), ControlState::Kleene { started, sub }) => {
                if let AstdNode::Automaton(a) = &**b {
                    vals.insert(self.started_var[&a.name].clone(), Value::Bool(*started));
                }
                self.walk(b, sub, universe, vals)
            }
            _ => None,
        }
    }
}

fn param_typing(params: &[Param]) -> Vec<Pred> {
    params
        .iter()
        .map(|p| Pred::cmp(CmpOp::In, Expr::ident(&p.name), Expr::ident(&p.sort)))
        .collect()
}

fn dedup(conds: Vec<Pred>) -> Vec<Pred> {
    let mut out: Vec<Pred> = Vec::new();
    for c in conds {
        if c != Pred::True && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Translates a specification into a data machine holding the variables
/// and one `<label>_act` operation per event, and a control machine that
/// includes it and encodes the ASTD state.
pub fn translate_state_encoding(doc: &SpecDoc) -> Result<StateEncoding, TranslateError> {
    let mut enc = StateEncoding::layout(doc).map_err(TranslateError::Unsupported)?;
    let data = data_machine(doc);
    let mut ctl = Machine {
        name: doc.name.clone(),
        includes: vec![data.name.clone()],
        ..Default::default()
    };
    for v in &enc.vars {
        if let Some(set) = &v.set {
            ctl.sets.push(set.clone());
        }
    }
    ctl.variables = enc.vars.iter().map(|v| (v.name.clone(), enc.var_type(v))).collect();
    ctl.init = enc.vars.iter().map(|v| (v.name.clone(), enc.var_init(v))).collect();
    let mut diags = Vec::new();
    let labels: Vec<String> = match &doc.astd {
        // A synchronised label may occur in no transition at all; it still
        // happens when no instance is required to take part.
        Some(AstdNode::Quant(q)) if q.kind != QuantKind::Interleave => {
            let mut ls = q.body.labels();
            ls.extend(q.sync_labels.iter().cloned());
            ls.into_iter().collect()
        }
        Some(root) => root.labels().into_iter().collect(),
        None => doc.events.iter().map(|e| e.def.label.clone()).collect(),
    };
    // Event declaration order, so the output follows the file.
    let mut ordered: Vec<String> = doc
        .events
        .iter()
        .map(|e| e.def.label.clone())
        .filter(|l| labels.contains(l))
        .collect();
    ordered.extend(labels.iter().filter(|l| doc.event(l).is_none()).cloned());
    for label in ordered {
        match control_operation(doc, &enc, &label) {
            Ok(Some(op)) => ctl.operations.push(op),
            Ok(None) => {}
            Err(d) => diags.push(d),
        }
    }
    check_names(doc, &enc, &ctl, &mut diags);
    if !diags.is_empty() {
        return Err(TranslateError::Unsupported(diags));
    }
    enc.spec = BSpec {
        machines: vec![data, ctl],
    };
    Ok(enc)
}

fn act_call(doc: &SpecDoc, label: &str, args: Vec<Expr>) -> Option<BSubst> {
    let e = doc.event(label)?;
    (!e.pure).then(|| BSubst::Call {
        op: format!("{label}_act"),
        args,
    })
}

fn writes_subst(enc: &StateEncoding, g: &Gen<'_>, writes: &BTreeMap<String, Expr>) -> Vec<BSubst> {
    // Layout order keeps the output stable and readable.
    enc.vars
        .iter()
        .filter_map(|v| {
            let e = writes.get(&v.name)?.clone();
            Some(BSubst::Data(match &g.index {
                Some(t) => Subst::AssignAt(v.name.clone(), Expr::ident(t), e),
                None => Subst::Assign(v.name.clone(), e),
            }))
        })
        .collect()
}

fn control_operation(
    doc: &SpecDoc,
    enc: &StateEncoding,
    label: &str,
) -> Result<Option<Operation>, Diagnostic> {
    let decl = doc
        .event(label)
        .ok_or_else(|| unsupported(doc.span, format!("label `{label}` has no event declaration")))?;
    let mut params = decl.def.params.clone();
    let Some(root) = &doc.astd else {
        let args = params.iter().map(|p| Expr::ident(&p.name)).collect();
        return Ok(act_call(doc, label, args).map(|body| Operation {
            name: label.to_string(),
            pre: param_typing(&params),
            params,
            body,
        }));
    };
    let patterns: Vec<&EventPattern> = root
        .automata()
        .into_iter()
        .flat_map(|a| a.transitions.iter())
        .filter(|t| t.event.label == label)
        .map(|t| &t.event)
        .collect();
    let (quant, body) = match root {
        AstdNode::Quant(q) => (Some(q), &*q.body),
        n => (None, n),
    };
    for p in &patterns {
        for a in &p.args {
            if let ArgPattern::Var(v) = a {
                if quant.is_none_or(|q| q.var != *v) {
                    return Err(unsupported(q_span(quant, doc), format!("pattern variable `{v}` is not the root variable")));
                }
            }
        }
    }
    let synced = quant.is_some_and(|q| q.kind != QuantKind::Interleave && q.sync_labels.contains(label));
    // An argument position where every pattern names the instance binds it.
    let bound = match quant {
        Some(q) if !synced => (0..params.len()).find(|&j| {
            patterns
                .iter()
                .all(|p| matches!(&p.args[j], ArgPattern::Var(v) if *v == q.var))
        }),
        _ => None,
    };
    if let (Some(j), Some(q)) = (bound, quant) {
        for (i, p) in params.iter_mut().enumerate() {
            if i != j && p.name == q.var {
                p.name = format!("{}_{i}", p.name);
            }
        }
        params[j].name = q.var.clone();
    }
    let args: Vec<Expr> = params.iter().map(|p| Expr::ident(&p.name)).collect();
    let g = Gen {
        enc,
        index: quant.map(|q| q.var.clone()),
        params: args.clone(),
        label: label.to_string(),
    };
    let branches: Vec<Branch> = g
        .gen(body, false)
        .into_iter()
        .map(|b| {
            let conds = dedup(b.conds);
            // A write of the value the branch already tests for is a no-op.
            let writes = b
                .writes
                .into_iter()
                .filter(|(v, e)| !conds.contains(&Pred::cmp(CmpOp::Eq, g.at(v), e.clone())))
                .collect();
            Branch { conds, writes }
        })
        .filter(|b| !b.conds.contains(&Pred::False))
        .collect();
    let mut pre = param_typing(&params);
    let call = act_call(doc, label, args);
    if synced {
        let q = quant.expect("synchronised labels sit under a quantification");
        return sync_operation(doc, enc, &g, q, label, params, pre, branches, call).map(Some);
    }
    if branches.is_empty() {
        return Ok(None);
    }
    let with_call = |mut items: Vec<BSubst>| {
        items.extend(call.clone());
        BSubst::Par(items)
    };
    // Conditions shared by every branch move into the precondition.
    let common: Vec<Pred> = branches[0]
        .conds
        .iter()
        .filter(|c| branches.iter().all(|b| b.conds.contains(c)))
        .cloned()
        .collect();
    let arms: Vec<(Pred, BSubst)> = branches
        .iter()
        .map(|b| {
            let rest = b.conds.iter().filter(|c| !common.contains(c)).cloned();
            (Pred::conj(rest), with_call(writes_subst(enc, &g, &b.writes)))
        })
        .collect();
    let choice = if arms.len() == 1 {
        arms.into_iter().next().expect("one arm").1
    } else {
        BSubst::Select(arms)
    };
    let body = match (quant, bound) {
        (Some(q), None) => BSubst::Any {
            var: q.var.clone(),
            sort: q.domain.clone(),
            pred: Pred::conj(common),
            body: Box::new(choice),
        },
        _ => {
            pre.extend(common);
            choice
        }
    };
    Ok(Some(Operation {
        name: label.to_string(),
        params,
        pre,
        body,
    }))
}

fn q_span(q: Option<&crate::control::Quant>, doc: &SpecDoc) -> Span {
    q.map_or(doc.span, |q| q.span)
}

/// Every required instance takes one of its branches at once. Each written
/// variable gets a `V : (!t.(...))` substitution describing its after-value
/// pointwise; branches must be pairwise exclusive for this to be exact.
#[allow(clippy::too_many_arguments)]
fn sync_operation(
    doc: &SpecDoc,
    enc: &StateEncoding,
    g: &Gen<'_>,
    q: &crate::control::Quant,
    label: &str,
    params: Vec<Param>,
    mut pre: Vec<Pred>,
    branches: Vec<Branch>,
    call: Option<BSubst>,
) -> Result<Operation, Diagnostic> {
    if q.kind == QuantKind::WeakSync && !doc.has_option(OPT_WEAK_SYNC_STRICT) {
        return Err(unsupported(
            q.span,
            format!("`{label}` under literal weak synchronisation lets idle instances move; only the strict reading is translated"),
        ));
    }
    for (i, a) in branches.iter().enumerate() {
        for b in &branches[i + 1..] {
            if !exclusive(a, b) {
                return Err(unsupported(
                    q.span,
                    format!("synchronised label `{label}` has overlapping alternatives for one instance"),
                ));
            }
        }
    }
    let t = &q.var;
    let required = match q.kind {
        QuantKind::WeakSync => q.sync_pred.clone(),
        _ => Pred::True,
    };
    let within = |p: Pred| match &required {
        Pred::True => p,
        r => Pred::and(r.clone(), p),
    };
    let guard = |c: &[Pred]| Pred::conj(c.iter().cloned());
    let can_step = Pred::disj(branches.iter().map(|b| guard(&b.conds)));
    let must = match &required {
        Pred::True => can_step.clone(),
        r => Pred::implies(r.clone(), can_step.clone()),
    };
    pre.push(Pred::Forall(t.clone(), Expr::ident(&q.domain), Box::new(must)));
    let mut items = Vec::new();
    for v in &enc.vars {
        if !branches.iter().any(|b| b.writes.contains_key(&v.name)) {
            continue;
        }
        let before = g.at(&v.name);
        let after = Expr::app(Expr::Primed(v.name.clone()), Expr::ident(t));
        let mut clauses = Vec::new();
        for b in &branches {
            let value = b.writes.get(&v.name).cloned().unwrap_or_else(|| before.clone());
            clauses.push(Pred::implies(
                within(guard(&b.conds)),
                Pred::cmp(CmpOp::Eq, after.clone(), value),
            ));
        }
        clauses.push(Pred::implies(
            Pred::not(within(can_step.clone())),
            Pred::cmp(CmpOp::Eq, after, before),
        ));
        let body = Pred::Forall(t.clone(), Expr::ident(&q.domain), Box::new(Pred::conj(clauses)));
        items.push(BSubst::Data(Subst::Such(v.name.clone(), body)));
    }
    items.extend(call);
    Ok(Operation {
        name: label.to_string(),
        params,
        pre,
        body: BSubst::Par(items),
    })
}

/// Generated identifiers must not clash with each other or with names of
/// the source specification.
fn check_names(doc: &SpecDoc, enc: &StateEncoding, ctl: &Machine, diags: &mut Vec<Diagnostic>) {
    let mut seen: HashMap<String, &'static str> = HashMap::new();
    let mut taken = |n: &str, what: &'static str, diags: &mut Vec<Diagnostic>| {
        if let Some(prev) = seen.insert(n.to_string(), what) {
            diags.push(Diagnostic::error(
                doc.span,
                format!("generated {what} `{n}` clashes with a {prev} of the same name"),
            ));
        }
    };
    for s in &doc.sorts {
        taken(&s.name, "set", diags);
        for e in &s.elements {
            taken(e, "element", diags);
        }
    }
    for c in &doc.constants {
        taken(&c.name, "constant", diags);
    }
    for v in &doc.variables {
        taken(&v.name, "variable", diags);
    }
    for e in &doc.events {
        if !e.pure {
            taken(&format!("{}_act", e.def.label), "operation", diags);
        }
    }
    for v in &enc.vars {
        taken(&v.name, "variable", diags);
        if let Some((set, elems)) = &v.set {
            taken(set, "set", diags);
            for e in elems {
                taken(e, "element", diags);
            }
        }
    }
    for op in &ctl.operations {
        taken(&op.name, "operation", diags);
    }
}
