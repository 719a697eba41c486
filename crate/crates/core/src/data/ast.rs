//! Syntax trees for expressions, predicates, substitutions and types.

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Inter,
    Diff,
    /// Relational override `f <+ g`.
    Override,
    /// Domain subtraction `s <<| r`.
    DomSub,
    /// Cartesian product `s * t`.
    Product,
}

impl SetOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SetOp::Union => "\\/",
            SetOp::Inter => "/\\",
            SetOp::Diff => "-",
            SetOp::Override => "<+",
            SetOp::DomSub => "<<|",
            SetOp::Product => "*",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Variable, constant, sort, atom, parameter or bound name.
    Ident(String),
    /// After-value of a state variable in a two-state context.
    Primed(String),
    Bool(bool),
    Pair(Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Dom(Box<Expr>),
    Ran(Box<Expr>),
    SetLit(Vec<Expr>),
    Bin(SetOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn ident(name: impl Into<String>) -> Expr {
        Expr::Ident(name.into())
    }

    pub fn app(f: Expr, arg: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(arg))
    }

    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::Pair(Box::new(a), Box::new(b))
    }

    pub fn bin(op: SetOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
    In,
    NotIn,
    Subset,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "/=",
            CmpOp::In => ":",
            CmpOp::NotIn => "/:",
            CmpOp::Subset => "<:",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    True,
    False,
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    /// `!x:bound.(body)`
    Forall(String, Expr, Box<Pred>),
    /// `#x:bound.(body)`
    Exists(String, Expr, Box<Pred>),
}

impl Pred {
    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Pred {
        Pred::Cmp(op, a, b)
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        match (a, b) {
            (Pred::True, b) => b,
            (a, Pred::True) => a,
            (a, b) => Pred::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        match (a, b) {
            (Pred::False, b) => b,
            (a, Pred::False) => a,
            (a, b) => Pred::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn not(a: Pred) -> Pred {
        match a {
            Pred::True => Pred::False,
            Pred::False => Pred::True,
            a => Pred::Not(Box::new(a)),
        }
    }

    pub fn implies(a: Pred, b: Pred) -> Pred {
        Pred::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction of `preds`; `True` when empty.
    pub fn conj(preds: impl IntoIterator<Item = Pred>) -> Pred {
        preds.into_iter().fold(Pred::True, Pred::and)
    }

    pub fn disj(preds: impl IntoIterator<Item = Pred>) -> Pred {
        preds.into_iter().fold(Pred::False, Pred::or)
    }

    /// Top-level conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Pred> {
        match self {
            Pred::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            Pred::True => Vec::new(),
            p => vec![p],
        }
    }

    /// Replaces free occurrences of `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Pred {
        match self {
            Pred::True | Pred::False => self.clone(),
            Pred::Cmp(op, a, b) => Pred::Cmp(*op, a.substitute(name, with), b.substitute(name, with)),
            Pred::Not(p) => Pred::Not(Box::new(p.substitute(name, with))),
            Pred::And(a, b) => Pred::And(
                Box::new(a.substitute(name, with)),
                Box::new(b.substitute(name, with)),
            ),
            Pred::Or(a, b) => Pred::Or(
                Box::new(a.substitute(name, with)),
                Box::new(b.substitute(name, with)),
            ),
            Pred::Implies(a, b) => Pred::Implies(
                Box::new(a.substitute(name, with)),
                Box::new(b.substitute(name, with)),
            ),
            Pred::Forall(x, bound, body) | Pred::Exists(x, bound, body) => {
                let bound = bound.substitute(name, with);
                let body = if x == name {
                    (**body).clone()
                } else {
                    body.substitute(name, with)
                };
                if matches!(self, Pred::Forall(..)) {
                    Pred::Forall(x.clone(), bound, Box::new(body))
                } else {
                    Pred::Exists(x.clone(), bound, Box::new(body))
                }
            }
        }
    }

    /// Names occurring free, primed names reported with a trailing `'`.
    pub fn free_names(&self, out: &mut BTreeSet<String>) {
        let mut bound = Vec::new();
        self.collect_free(&mut bound, out);
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Cmp(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Pred::Not(p) => p.collect_free(bound, out),
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Pred::Forall(x, e, body) | Pred::Exists(x, e, body) => {
                e.collect_free(bound, out);
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

impl Expr {
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        match self {
            Expr::Ident(n) if n == name => with.clone(),
            Expr::Ident(_) | Expr::Primed(_) | Expr::Bool(_) => self.clone(),
            Expr::Pair(a, b) => Expr::pair(a.substitute(name, with), b.substitute(name, with)),
            Expr::App(f, a) => Expr::app(f.substitute(name, with), a.substitute(name, with)),
            Expr::Dom(e) => Expr::Dom(Box::new(e.substitute(name, with))),
            Expr::Ran(e) => Expr::Ran(Box::new(e.substitute(name, with))),
            Expr::SetLit(es) => Expr::SetLit(es.iter().map(|e| e.substitute(name, with)).collect()),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(name, with), b.substitute(name, with)),
        }
    }

    pub fn free_names(&self, out: &mut BTreeSet<String>) {
        self.collect_free(&mut Vec::new(), out);
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Ident(n) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            Expr::Primed(n) => {
                out.insert(format!("{n}'"));
            }
            Expr::Bool(_) => {}
            Expr::Pair(a, b) | Expr::App(a, b) | Expr::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Dom(e) | Expr::Ran(e) => e.collect_free(bound, out),
            Expr::SetLit(es) => es.iter().for_each(|e| e.collect_free(bound, out)),
        }
    }
}

/// Generalised substitutions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subst {
    Skip,
    /// `x := e`
    Assign(String, Expr),
    /// `f(a) := e`, a pointwise override of `f`.
    AssignAt(String, Expr, Expr),
    /// `x :| (P)` with `x'` denoting the after-value in `P`.
    Such(String, Pred),
    Parallel(Vec<Subst>),
    Select(Vec<(Pred, Subst)>),
}

impl Subst {
    /// Variables possibly written, in a stable order.
    pub fn written(&self, out: &mut BTreeSet<String>) {
        match self {
            Subst::Skip => {}
            Subst::Assign(x, _) | Subst::AssignAt(x, _, _) | Subst::Such(x, _) => {
                out.insert(x.clone());
            }
            Subst::Parallel(ss) => ss.iter().for_each(|s| s.written(out)),
            Subst::Select(bs) => bs.iter().for_each(|(_, s)| s.written(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Sort(String),
    Pow(Box<Type>),
    Prod(Box<Type>, Box<Type>),
    /// Partial function `+->`.
    PFun(Box<Type>, Box<Type>),
    /// Total function `-->`.
    TFun(Box<Type>, Box<Type>),
    /// Relation `<->`.
    Rel(Box<Type>, Box<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub sort: String,
}

/// A guarded data event: `ANY params WHERE guard THEN action END`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventDef {
    pub label: String,
    pub params: Vec<Param>,
    pub guard: Pred,
    pub action: Subst,
}
