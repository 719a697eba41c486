use std::fmt::Write;

use super::doc::{ConstDef, SpecDoc};
use crate::control::{ArgPattern, Arrow, AstdNode, QuantKind};
use crate::data::{Expr, Pred, Subst, Type};

/// Canonical text of a document; parsing it back yields an equal document.
pub fn render(doc: &SpecDoc) -> String {
    let mut out = String::new();
    let _ = write!(out, "SPEC {}", doc.name);
    if let Some(l) = doc.level {
        let _ = write!(out, " LEVEL {l}");
    }
    out.push_str("\n\n");
    if !doc.options.is_empty() {
        let _ = writeln!(out, "OPTIONS {};\n", doc.options.join(", "));
    }
    if !doc.sorts.is_empty() {
        out.push_str("SORTS\n");
        for s in &doc.sorts {
            let _ = writeln!(out, "  {} = {{{}}};", s.name, s.elements.join(", "));
        }
        out.push('\n');
    }
    if !doc.constants.is_empty() {
        out.push_str("CONSTANTS\n");
        for c in &doc.constants {
            let def = match &c.def {
                ConstDef::Order(s) => format!("ORDER({s})"),
                ConstDef::Expr(e) => expr(e),
            };
            let _ = writeln!(out, "  {} = {};", c.name, def);
        }
        out.push('\n');
    }
    if !doc.variables.is_empty() {
        out.push_str("VARIABLES\n");
        for v in &doc.variables {
            let _ = writeln!(out, "  {} : {} := {};", v.name, ty(&v.ty), expr(&v.init));
        }
        out.push('\n');
    }
    if !doc.invariants.is_empty() {
        out.push_str("INVARIANTS\n");
        for i in &doc.invariants {
            let _ = writeln!(out, "  {} :\n    {};", i.name, pred(&i.pred));
        }
        out.push('\n');
    }
    if !doc.theorems.is_empty() {
        out.push_str("THEOREMS\n");
        for t in &doc.theorems {
            let _ = writeln!(out, "  {} ON {} :\n    {};", t.name, t.event, pred(&t.pred));
        }
        out.push('\n');
    }
    if !doc.events.is_empty() {
        out.push_str("EVENTS\n");
        for e in &doc.events {
            let d = &e.def;
            let params = if d.params.is_empty() {
                String::new()
            } else {
                let ps: Vec<String> = d
                    .params
                    .iter()
                    .map(|p| format!("{} : {}", p.name, p.sort))
                    .collect();
                format!("({})", ps.join(", "))
            };
            if e.pure {
                let _ = writeln!(out, "  PURE {}{};", d.label, params);
                continue;
            }
            let _ = writeln!(out, "  EVENT {}{}", d.label, params);
            if d.guard != Pred::True {
                let _ = writeln!(out, "  WHERE\n    {}", pred(&d.guard));
            }
            if d.action != Subst::Skip {
                let _ = writeln!(out, "  THEN\n    {}", subst(&d.action));
            }
            out.push_str("  END;\n");
        }
        out.push('\n');
    }
    if let Some(a) = &doc.astd {
        out.push_str("ASTD\n");
        astd(a, 1, &mut out);
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

pub fn ty(t: &Type) -> String {
    let child = |t: &Type| match t {
        Type::Bool | Type::Sort(_) | Type::Pow(_) => ty(t),
        _ => format!("({})", ty(t)),
    };
    match t {
        Type::Bool => "BOOL".into(),
        Type::Sort(s) => s.clone(),
        Type::Pow(t) => format!("POW({})", ty(t)),
        Type::Prod(a, b) => format!("{} * {}", child(a), child(b)),
        Type::PFun(a, b) => format!("{} +-> {}", child(a), child(b)),
        Type::TFun(a, b) => format!("{} --> {}", child(a), child(b)),
        Type::Rel(a, b) => format!("{} <-> {}", child(a), child(b)),
    }
}

pub fn expr(e: &Expr) -> String {
    let child = |e: &Expr| match e {
        Expr::Pair(..) | Expr::Bin(..) => format!("({})", expr(e)),
        _ => expr(e),
    };
    match e {
        Expr::Ident(n) => n.clone(),
        Expr::Primed(n) => format!("{n}'"),
        Expr::Bool(true) => "TRUE".into(),
        Expr::Bool(false) => "FALSE".into(),
        Expr::Pair(a, b) => format!("{} |-> {}", child(a), child(b)),
        Expr::App(f, a) => format!("{}({})", child(f), expr(a)),
        Expr::Dom(a) => format!("dom({})", expr(a)),
        Expr::Ran(a) => format!("ran({})", expr(a)),
        Expr::SetLit(xs) => {
            let items: Vec<String> = xs.iter().map(expr).collect();
            format!("{{{}}}", items.join(", "))
        }
        Expr::Bin(op, a, b) => format!("{} {} {}", child(a), op.symbol(), child(b)),
    }
}

pub fn pred(p: &Pred) -> String {
    let child = |p: &Pred| match p {
        Pred::And(..) | Pred::Or(..) | Pred::Implies(..) => format!("({})", pred(p)),
        _ => pred(p),
    };
    match p {
        Pred::True => "btrue".into(),
        Pred::False => "bfalse".into(),
        Pred::Cmp(op, a, b) => format!("{} {} {}", expr(a), op.symbol(), expr(b)),
        Pred::Not(q) => format!("not ({})", pred(q)),
        Pred::And(a, b) => format!("{} & {}", child(a), child(b)),
        Pred::Or(a, b) => format!("{} or {}", child(a), child(b)),
        Pred::Implies(a, b) => format!("{} => {}", child(a), child(b)),
        Pred::Forall(x, s, body) => format!("!{x} : {} . ({})", expr(s), pred(body)),
        Pred::Exists(x, s, body) => format!("#{x} : {} . ({})", expr(s), pred(body)),
    }
}

pub fn subst(s: &Subst) -> String {
    match s {
        Subst::Skip => "skip".into(),
        Subst::Assign(x, e) => format!("{x} := {}", expr(e)),
        Subst::AssignAt(f, at, e) => format!("{f}({}) := {}", expr(at), expr(e)),
        Subst::Such(x, p) => format!("{x} :| ({})", pred(p)),
        Subst::Parallel(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| match i {
                    Subst::Parallel(_) => format!("({})", subst(i)),
                    _ => subst(i),
                })
                .collect();
            parts.join(" || ")
        }
        Subst::Select(branches) => {
            let mut out = String::from("SELECT");
            for (i, (g, b)) in branches.iter().enumerate() {
                let kw = if i == 0 { "" } else { " WHEN" };
                let _ = write!(out, "{kw} {} THEN {}", pred(g), subst(b));
            }
            out.push_str(" END");
            out
        }
    }
}

fn pad(depth: usize) -> String {
    "  ".repeat(depth)
}

fn astd(node: &AstdNode, depth: usize, out: &mut String) {
    out.push_str(&pad(depth));
    astd_inline(node, depth, out);
    out.push('\n');
}

/// Renders without leading indentation or trailing newline.
fn astd_inline(node: &AstdNode, depth: usize, out: &mut String) {
    match node {
        AstdNode::Elem => out.push_str("ELEM"),
        AstdNode::Kleene(b) => {
            out.push_str("KLEENE (\n");
            astd(b, depth + 1, out);
            let _ = write!(out, "{})", pad(depth));
        }
        AstdNode::Quant(q) => {
            let head = match q.kind {
                QuantKind::Interleave => format!("||| {} : {} .", q.var, q.domain),
                QuantKind::Sync => {
                    let labels: Vec<&str> = q.sync_labels.iter().map(String::as_str).collect();
                    format!("|| {} : {} {{{}}} .", q.var, q.domain, labels.join(", "))
                }
                QuantKind::WeakSync => {
                    let labels: Vec<&str> = q.sync_labels.iter().map(String::as_str).collect();
                    format!(
                        "WSYNC {} : {} {{{}}} WHEN ({}) .",
                        q.var,
                        q.domain,
                        labels.join(", "),
                        pred(&q.sync_pred)
                    )
                }
            };
            out.push_str(&head);
            out.push('\n');
            out.push_str(&pad(depth + 1));
            astd_inline(&q.body, depth + 1, out);
        }
        AstdNode::Automaton(a) => {
            let _ = writeln!(out, "AUT {} {{", a.name);
            let inner = pad(depth + 1);
            let _ = writeln!(out, "{inner}INIT {};", a.init);
            if !a.finals.is_empty() {
                let finals: Vec<&str> = a.finals.iter().map(String::as_str).collect();
                let _ = writeln!(out, "{inner}FINAL {};", finals.join(", "));
            }
            for (name, body) in &a.states {
                if body.is_elem() {
                    let _ = writeln!(out, "{inner}STATE {name};");
                } else {
                    let _ = write!(out, "{inner}STATE {name} = ");
                    astd_inline(body, depth + 1, out);
                    out.push_str(";\n");
                }
            }
            for t in &a.transitions {
                let arrow = match &t.arrow {
                    Arrow::Loc { from, to } => format!("{from} -> {to}"),
                    Arrow::ToSub { from, to, to_sub } => format!("{from} -> {to}/{to_sub}"),
                    Arrow::FromSub { from, from_sub, to } => {
                        format!("{from}/{from_sub} -> {to}")
                    }
                };
                let args: Vec<&str> = t.event.args.iter().map(ArgPattern::name).collect();
                let mut line = format!("{inner}TRANS {arrow} : {}", t.event.label);
                if !args.is_empty() {
                    let _ = write!(line, "({})", args.join(", "));
                }
                if t.guard != Pred::True {
                    let _ = write!(line, " GUARD ({})", pred(&t.guard));
                }
                if t.final_flag {
                    line.push_str(" FINAL");
                }
                let _ = writeln!(out, "{line};");
            }
            let _ = write!(out, "{}}}", pad(depth));
        }
    }
}
