//! Classical B notation for data-layer syntax trees.

use crate::data::{Expr, Pred, Type};

pub fn btype(t: &Type) -> String {
    // The specification language already uses the B ASCII operators.
    crate::spec_lang::render_type(t)
}

pub fn bexpr(e: &Expr) -> String {
    crate::spec_lang::render_expr(e)
}

pub fn bpred(p: &Pred) -> String {
    let child = |p: &Pred| match p {
        Pred::And(..) | Pred::Or(..) | Pred::Implies(..) => format!("({})", bpred(p)),
        _ => bpred(p),
    };
    match p {
        Pred::True => "btrue".into(),
        Pred::False => "bfalse".into(),
        Pred::Cmp(op, a, b) => format!("{} {} {}", bexpr(a), op.symbol(), bexpr(b)),
        Pred::Not(q) => format!("not({})", bpred(q)),
        Pred::And(a, b) => format!("{} & {}", child(a), child(b)),
        Pred::Or(a, b) => format!("{} or {}", child(a), child(b)),
        Pred::Implies(a, b) => format!("{} => {}", child(a), child(b)),
        Pred::Forall(x, s, body) => format!("!{x}.({x} : {} => {})", bexpr(s), child(body)),
        Pred::Exists(x, s, body) => format!("#{x}.({x} : {} & {})", bexpr(s), child(body)),
    }
}

/// Rewrites a before/after predicate on `var` into B's `var : (P)` form:
/// `var'` becomes `var` and the before-value `var` becomes `var$0`.
pub fn unprime(p: &Pred, var: &str) -> Pred {
    let before = p.substitute(var, &Expr::ident(format!("{var}$0")));
    map_pred(&before, &|e| match e {
        Expr::Primed(n) if n == var => Some(Expr::ident(n.clone())),
        _ => None,
    })
}

fn map_pred(p: &Pred, f: &dyn Fn(&Expr) -> Option<Expr>) -> Pred {
    let bx = |q: &Pred| Box::new(map_pred(q, f));
    match p {
        Pred::True | Pred::False => p.clone(),
        Pred::Cmp(op, a, b) => Pred::Cmp(*op, map_expr(a, f), map_expr(b, f)),
        Pred::Not(q) => Pred::Not(bx(q)),
        Pred::And(a, b) => Pred::And(bx(a), bx(b)),
        Pred::Or(a, b) => Pred::Or(bx(a), bx(b)),
        Pred::Implies(a, b) => Pred::Implies(bx(a), bx(b)),
        Pred::Forall(x, s, body) => Pred::Forall(x.clone(), map_expr(s, f), bx(body)),
        Pred::Exists(x, s, body) => Pred::Exists(x.clone(), map_expr(s, f), bx(body)),
    }
}

fn map_expr(e: &Expr, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
    if let Some(r) = f(e) {
        return r;
    }
    match e {
        Expr::Ident(_) | Expr::Primed(_) | Expr::Bool(_) => e.clone(),
        Expr::Pair(a, b) => Expr::pair(map_expr(a, f), map_expr(b, f)),
        Expr::App(g, a) => Expr::app(map_expr(g, f), map_expr(a, f)),
        Expr::Dom(a) => Expr::Dom(Box::new(map_expr(a, f))),
        Expr::Ran(a) => Expr::Ran(Box::new(map_expr(a, f))),
        Expr::SetLit(xs) => Expr::SetLit(xs.iter().map(|x| map_expr(x, f)).collect()),
        Expr::Bin(op, a, b) => Expr::bin(*op, map_expr(a, f), map_expr(b, f)),
    }
}
