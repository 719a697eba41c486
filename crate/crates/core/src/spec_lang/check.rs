use std::collections::{BTreeSet, HashMap, HashSet};

use super::doc::{ConstDef, SpecDoc};
use crate::control::{ArgPattern, Arrow, AstdNode, Automaton};
use crate::data::{Expr, Pred, Subst, Type};
use crate::diag::{Diagnostic, Span};

/// Static well-formedness diagnostics; an empty result means the document
/// can be loaded.
pub fn check_static(doc: &SpecDoc) -> Vec<Diagnostic> {
    let mut c = Checker {
        doc,
        diags: Vec::new(),
        globals: HashSet::new(),
        sorts: HashMap::new(),
        atoms: HashMap::new(),
    };
    c.declarations();
    c.expressions();
    if let Some(root) = &doc.astd {
        c.astd(root, &mut Vec::new());
    }
    c.diags
}

struct Checker<'a> {
    doc: &'a SpecDoc,
    diags: Vec<Diagnostic>,
    /// Variables, constants, sorts, atoms and built-ins.
    globals: HashSet<String>,
    sorts: HashMap<&'a str, Span>,
    /// Atom name → its sort.
    atoms: HashMap<&'a str, &'a str>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg));
    }

    fn declarations(&mut self) {
        let doc = self.doc;
        let mut kinds: HashMap<&str, &str> = HashMap::new();
        let mut claim = |this: &mut Self, name: &'a str, kind: &'static str, span: Span| {
            if let Some(prev) = kinds.get(name) {
                this.error(span, format!("duplicate name `{name}` ({kind}; already declared as {prev})"));
            } else {
                kinds.insert(name, kind);
            }
        };
        for s in &doc.sorts {
            claim(self, &s.name, "sort", s.span);
            self.sorts.insert(&s.name, s.span);
            if s.elements.is_empty() {
                self.error(s.span, format!("sort `{}` has no elements", s.name));
            }
            for e in &s.elements {
                claim(self, e, "atom", s.span);
                self.atoms.entry(e).or_insert(&s.name);
            }
        }
        for c in &doc.constants {
            claim(self, &c.name, "constant", c.span);
        }
        for v in &doc.variables {
            claim(self, &v.name, "variable", v.span);
        }
        for e in &doc.events {
            claim(self, &e.def.label, "event", e.span);
        }
        for builtin in ["TRUE", "FALSE", "BOOL"] {
            if let Some(k) = kinds.get(builtin) {
                self.error(doc.span, format!("`{builtin}` is reserved but declared as {k}"));
            }
        }
        let mut named = HashSet::new();
        for (name, span) in doc
            .invariants
            .iter()
            .map(|i| (&i.name, i.span))
            .chain(doc.theorems.iter().map(|t| (&t.name, t.span)))
        {
            if !named.insert(name.as_str()) {
                self.error(span, format!("duplicate invariant or theorem name `{name}`"));
            }
        }
        self.globals.extend(["TRUE", "FALSE", "BOOL"].map(String::from));
        self.globals.extend(doc.sorts.iter().map(|s| s.name.clone()));
        self.globals.extend(self.atoms.keys().map(|s| s.to_string()));
    }

    fn check_type(&mut self, t: &Type, span: Span) {
        match t {
            Type::Bool => {}
            Type::Sort(s) => {
                if !self.sorts.contains_key(s.as_str()) {
                    self.error(span, format!("unknown sort `{s}`"));
                }
            }
            Type::Pow(a) => self.check_type(a, span),
            Type::Prod(a, b) | Type::PFun(a, b) | Type::TFun(a, b) | Type::Rel(a, b) => {
                self.check_type(a, span);
                self.check_type(b, span);
            }
        }
    }

    /// Reports free names of `names` that are neither in scope nor allowed
    /// primed variables.
    fn names(&mut self, names: BTreeSet<String>, local: &[&str], primed: &[&str], span: Span, what: &str) {
        for n in names {
            if let Some(base) = n.strip_suffix('\'') {
                if !primed.contains(&base) {
                    if self.doc.variable(base).is_some() {
                        self.error(span, format!("primed variable `{n}` not allowed in {what}"));
                    } else {
                        self.error(span, format!("unknown identifier `{base}` in {what}"));
                    }
                }
                continue;
            }
            if !self.globals.contains(&n) && !local.contains(&n.as_str()) {
                self.error(span, format!("unknown identifier `{n}` in {what}"));
            }
        }
    }

    fn pred_names(p: &Pred) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        p.free_names(&mut s);
        s
    }

    fn expr_names(e: &Expr) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        e.free_names(&mut s);
        s
    }

    fn expressions(&mut self) {
        let doc = self.doc;
        // Constants may refer to earlier constants only.
        for c in &doc.constants {
            match &c.def {
                ConstDef::Order(s) => {
                    if !self.sorts.contains_key(s.as_str()) {
                        self.error(c.span, format!("unknown sort `{s}` in ORDER"));
                    }
                }
                ConstDef::Expr(e) => {
                    let names = Self::expr_names(e);
                    self.names(names, &[], &[], c.span, &format!("constant `{}`", c.name));
                }
            }
            self.globals.insert(c.name.clone());
        }
        for v in &doc.variables {
            self.check_type(&v.ty, v.span);
            let names = Self::expr_names(&v.init);
            self.names(names, &[], &[], v.span, &format!("initial value of `{}`", v.name));
        }
        self.globals.extend(doc.variables.iter().map(|v| v.name.clone()));
        for i in &doc.invariants {
            let names = Self::pred_names(&i.pred);
            self.names(names, &[], &[], i.span, &format!("invariant `{}`", i.name));
        }
        let all_vars: Vec<&str> = doc.variables.iter().map(|v| v.name.as_str()).collect();
        for t in &doc.theorems {
            let Some(ev) = doc.event(&t.event) else {
                self.error(t.span, format!("theorem `{}` refers to unknown event `{}`", t.name, t.event));
                continue;
            };
            let params: Vec<&str> = ev.def.params.iter().map(|p| p.name.as_str()).collect();
            let names = Self::pred_names(&t.pred);
            self.names(names, &params, &all_vars, t.span, &format!("theorem `{}`", t.name));
        }
        for e in &doc.events {
            let d = &e.def;
            let mut seen = HashSet::new();
            for p in &d.params {
                if !self.sorts.contains_key(p.sort.as_str()) {
                    self.error(e.span, format!("unknown sort `{}` for parameter `{}` of `{}`", p.sort, p.name, d.label));
                }
                if !seen.insert(p.name.as_str()) {
                    self.error(e.span, format!("duplicate parameter `{}` of `{}`", p.name, d.label));
                }
            }
            let params: Vec<&str> = d.params.iter().map(|p| p.name.as_str()).collect();
            let what = format!("event `{}`", d.label);
            let names = Self::pred_names(&d.guard);
            self.names(names, &params, &[], e.span, &what);
            self.subst(&d.action, &params, e.span, &what);
        }
    }

    fn subst(&mut self, s: &Subst, params: &[&str], span: Span, what: &str) {
        let target = |this: &mut Self, x: &str| {
            if this.doc.variable(x).is_none() {
                this.error(span, format!("assignment to undeclared variable `{x}` in {what}"));
            }
        };
        match s {
            Subst::Skip => {}
            Subst::Assign(x, e) => {
                target(self, x);
                self.names(Self::expr_names(e), params, &[], span, what);
            }
            Subst::AssignAt(x, at, e) => {
                target(self, x);
                let mut n = Self::expr_names(at);
                e.free_names(&mut n);
                self.names(n, params, &[], span, what);
            }
            Subst::Such(x, p) => {
                target(self, x);
                self.names(Self::pred_names(p), params, &[x.as_str()], span, what);
            }
            Subst::Parallel(items) => {
                for i in items {
                    self.subst(i, params, span, what);
                }
            }
            Subst::Select(branches) => {
                for (g, b) in branches {
                    self.names(Self::pred_names(g), params, &[], span, what);
                    self.subst(b, params, span, what);
                }
            }
        }
    }

    /// `scope` holds the quantification variables and their sorts.
    fn astd(&mut self, node: &AstdNode, scope: &mut Vec<(String, String)>) {
        match node {
            AstdNode::Elem => {}
            AstdNode::Kleene(b) => self.astd(b, scope),
            AstdNode::Quant(q) => {
                if !self.sorts.contains_key(q.domain.as_str()) {
                    self.error(q.span, format!("unknown sort `{}` in quantification", q.domain));
                }
                for l in &q.sync_labels {
                    if self.doc.event(l).is_none() {
                        self.error(q.span, format!("synchronised label `{l}` has no event"));
                    }
                }
                scope.push((q.var.clone(), q.domain.clone()));
                let local: Vec<String> = scope.iter().map(|(v, _)| v.clone()).collect();
                let local: Vec<&str> = local.iter().map(String::as_str).collect();
                let names = Self::pred_names(&q.sync_pred);
                self.names(names, &local, &[], q.span, "synchronisation predicate");
                self.astd(&q.body, scope);
                scope.pop();
            }
            AstdNode::Automaton(a) => {
                self.automaton(a, scope);
                for (_, s) in &a.states {
                    self.astd(s, scope);
                }
            }
        }
    }

    fn automaton(&mut self, a: &Automaton, scope: &[(String, String)]) {
        let mut seen = HashSet::new();
        for (n, _) in &a.states {
            if !seen.insert(n.as_str()) {
                self.error(a.span, format!("automaton `{}` declares state `{n}` twice", a.name));
            }
        }
        if a.state_index(&a.init).is_none() {
            self.error(a.span, format!("INIT state `{}` of `{}` is not declared", a.init, a.name));
        }
        for f in &a.finals {
            if a.state_index(f).is_none() {
                self.error(a.span, format!("FINAL state `{f}` of `{}` is not declared", a.name));
            }
        }
        let local: Vec<&str> = scope.iter().map(|(v, _)| v.as_str()).collect();
        for t in &a.transitions {
            let loc = t.span;
            let check_state = |this: &mut Self, n: &str| -> bool {
                if a.state_index(n).is_none() {
                    this.error(loc, format!("transition refers to unknown state `{n}` of `{}`", a.name));
                    false
                } else {
                    true
                }
            };
            let sub_state = |this: &mut Self, holder: &str, sub: &str| {
                match a.state_node(holder) {
                    Some(AstdNode::Automaton(b)) => {
                        if b.state_index(sub).is_none() {
                            this.error(loc, format!("`{sub}` is not a state of `{}` (held by `{holder}`)", b.name));
                        }
                    }
                    Some(_) => this.error(loc, format!("state `{holder}` of `{}` is not an automaton", a.name)),
                    None => {}
                }
            };
            match &t.arrow {
                Arrow::Loc { from, to } => {
                    check_state(self, from);
                    check_state(self, to);
                }
                Arrow::ToSub { from, to, to_sub } => {
                    check_state(self, from);
                    if check_state(self, to) {
                        sub_state(self, to, to_sub);
                    }
                }
                Arrow::FromSub { from, from_sub, to } => {
                    if check_state(self, from) {
                        sub_state(self, from, from_sub);
                    }
                    check_state(self, to);
                }
            }
            let label = &t.event.label;
            match self.doc.event(label) {
                None => self.error(loc, format!("transition on undeclared event `{label}`")),
                Some(ev) => {
                    let params = &ev.def.params;
                    if params.len() != t.event.args.len() {
                        self.error(
                            loc,
                            format!(
                                "event `{label}` takes {} argument(s) but the transition passes {}",
                                params.len(),
                                t.event.args.len()
                            ),
                        );
                    } else {
                        for (p, arg) in params.iter().zip(&t.event.args) {
                            let sort = match arg {
                                ArgPattern::Var(v) => scope
                                    .iter()
                                    .rev()
                                    .find(|(x, _)| x == v)
                                    .map(|(_, s)| s.as_str()),
                                ArgPattern::Atom(x) => match self.atoms.get(x.as_str()) {
                                    Some(s) => Some(*s),
                                    None => {
                                        self.error(loc, format!("unknown identifier `{x}` in transition `{label}`"));
                                        continue;
                                    }
                                },
                            };
                            if let Some(s) = sort {
                                if s != p.sort {
                                    self.error(
                                        loc,
                                        format!(
                                            "argument `{}` of `{label}` has sort {s}, expected {}",
                                            arg.name(),
                                            p.sort
                                        ),
                                    );
                                }
                            }
                        }
                    }
                }
            }
            let names = Self::pred_names(&t.guard);
            self.names(names, &local, &[], loc, &format!("guard of transition `{label}`"));
        }
    }
}
