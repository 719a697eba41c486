use std::fmt::Write as _;

use super::print::{bexpr, bpred, btype, unprime};
use crate::data::{Expr, Param, Pred, Subst, Type};

/// Substitutions of generated operations: the data-layer forms plus
/// operation calls and unbounded choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BSubst {
    Data(Subst),
    /// Call of an operation of an included machine.
    Call { op: String, args: Vec<Expr> },
    Par(Vec<BSubst>),
    Select(Vec<(Pred, BSubst)>),
    /// `ANY var WHERE var : sort & pred THEN body END`
    Any {
        var: String,
        sort: String,
        pred: Pred,
        body: Box<BSubst>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub params: Vec<Param>,
    /// Conjuncts of the precondition, parameter typing first.
    pub pre: Vec<Pred>,
    pub body: BSubst,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub includes: Vec<String>,
    pub sets: Vec<(String, Vec<String>)>,
    /// `name = value` properties, evaluated in order.
    pub constants: Vec<(String, Expr)>,
    pub variables: Vec<(String, Type)>,
    /// Named invariant clauses, after the typing of the variables.
    pub invariant: Vec<(String, Pred)>,
    /// `x := e` for each variable.
    pub init: Vec<(String, Expr)>,
    pub operations: Vec<Operation>,
}

impl Machine {
    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|o| o.name == name)
    }
}

/// A set of machines, included ones first; the last machine is the one
/// whose operations are the visible events.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BSpec {
    pub machines: Vec<Machine>,
}

impl BSpec {
    pub fn main(&self) -> &Machine {
        self.machines.last().expect("a B specification has a machine")
    }

    pub fn machine(&self, name: &str) -> Option<&Machine> {
        self.machines.iter().find(|m| m.name == name)
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.machines.iter().find_map(|m| m.operation(name))
    }

    /// B source text, one machine after the other.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.machines.iter().map(render_machine).collect();
        parts.join("\n")
    }
}

/// A predicate as one item of a `&`-separated list.
fn conjunct(p: &Pred) -> String {
    match p {
        Pred::Or(..) | Pred::Implies(..) => format!("({})", bpred(p)),
        _ => bpred(p),
    }
}

fn pad(depth: usize) -> String {
    "  ".repeat(depth)
}

fn clause(out: &mut String, name: &str, items: &[String], sep: &str) {
    if items.is_empty() {
        return;
    }
    out.push_str(name);
    out.push('\n');
    for (i, it) in items.iter().enumerate() {
        let tail = if i + 1 < items.len() { sep } else { "" };
        let _ = writeln!(out, "  {it}{tail}");
    }
}

pub fn render_machine(m: &Machine) -> String {
    let mut out = format!("MACHINE {}\n", m.name);
    clause(&mut out, "INCLUDES", &m.includes, ",");
    let sets: Vec<String> = m
        .sets
        .iter()
        .map(|(n, els)| format!("{n} = {{{}}}", els.join(", ")))
        .collect();
    clause(&mut out, "SETS", &sets, ";");
    let names: Vec<String> = m.constants.iter().map(|(n, _)| n.clone()).collect();
    clause(&mut out, "CONSTANTS", &names, ",");
    let props: Vec<String> = m
        .constants
        .iter()
        .map(|(n, e)| format!("{n} = {}", bexpr(e)))
        .collect();
    clause(&mut out, "PROPERTIES", &props, " &");
    let vars: Vec<String> = m.variables.iter().map(|(n, _)| n.clone()).collect();
    clause(&mut out, "VARIABLES", &vars, ",");
    let mut inv: Vec<String> = m
        .variables
        .iter()
        .map(|(n, t)| format!("{n} : {}", btype(t)))
        .collect();
    inv.extend(
        m.invariant
            .iter()
            .map(|(n, p)| format!("/* {n} */ {}", conjunct(p))),
    );
    clause(&mut out, "INVARIANT", &inv, " &");
    let init: Vec<String> = m
        .init
        .iter()
        .map(|(n, e)| format!("{n} := {}", bexpr(e)))
        .collect();
    clause(&mut out, "INITIALISATION", &init, " ||");
    if !m.operations.is_empty() {
        out.push_str("OPERATIONS\n");
        let ops: Vec<String> = m.operations.iter().map(render_operation).collect();
        out.push_str(&ops.join(";\n\n"));
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

pub fn render_operation(op: &Operation) -> String {
    let mut out = pad(1);
    out.push_str(&op.name);
    if !op.params.is_empty() {
        let ps: Vec<&str> = op.params.iter().map(|p| p.name.as_str()).collect();
        let _ = write!(out, "({})", ps.join(", "));
    }
    out.push_str(" =\n");
    if op.pre.is_empty() {
        let _ = writeln!(out, "{}BEGIN", pad(2));
    } else {
        let _ = writeln!(out, "{}PRE", pad(2));
        for (i, p) in op.pre.iter().enumerate() {
            let tail = if i + 1 < op.pre.len() { " &" } else { "" };
            let _ = writeln!(out, "{}{}{tail}", pad(3), conjunct(p));
        }
        let _ = writeln!(out, "{}THEN", pad(2));
    }
    subst_lines(&op.body, 3, &mut out);
    let _ = write!(out, "{}END", pad(2));
    out
}

/// One line per parallel component; nested blocks indented.
fn subst_lines(s: &BSubst, depth: usize, out: &mut String) {
    match s {
        BSubst::Par(items) => {
            let flat = flatten(items);
            for (i, it) in flat.iter().enumerate() {
                let tail = if i + 1 < flat.len() { " ||" } else { "" };
                match it {
                    BSubst::Select(_) | BSubst::Any { .. } => {
                        subst_lines(it, depth, out);
                        if !tail.is_empty() {
                            out.pop();
                            let _ = writeln!(out, "{tail}");
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "{}{}{tail}", pad(depth), simple(it));
                    }
                }
            }
            if flat.is_empty() {
                let _ = writeln!(out, "{}skip", pad(depth));
            }
        }
        BSubst::Select(branches) => {
            for (i, (g, b)) in branches.iter().enumerate() {
                let kw = if i == 0 { "SELECT" } else { "WHEN" };
                let _ = writeln!(out, "{}{kw}", pad(depth));
                let _ = writeln!(out, "{}{}", pad(depth + 1), bpred(g));
                let _ = writeln!(out, "{}THEN", pad(depth));
                subst_lines(b, depth + 1, out);
            }
            let _ = writeln!(out, "{}END", pad(depth));
        }
        BSubst::Any {
            var,
            sort,
            pred,
            body,
        } => {
            let _ = writeln!(out, "{}ANY {var} WHERE", pad(depth));
            let typing = Pred::cmp(crate::data::CmpOp::In, Expr::ident(var), Expr::ident(sort));
            let _ = writeln!(out, "{}{}", pad(depth + 1), bpred(&Pred::and(typing, pred.clone())));
            let _ = writeln!(out, "{}THEN", pad(depth));
            subst_lines(body, depth + 1, out);
            let _ = writeln!(out, "{}END", pad(depth));
        }
        BSubst::Data(Subst::Parallel(items)) => {
            let items: Vec<BSubst> = items.iter().cloned().map(BSubst::Data).collect();
            subst_lines(&BSubst::Par(items), depth, out)
        }
        BSubst::Data(Subst::Select(branches)) => {
            let bs = branches
                .iter()
                .map(|(g, b)| (g.clone(), BSubst::Data(b.clone())))
                .collect();
            subst_lines(&BSubst::Select(bs), depth, out)
        }
        _ => {
            let _ = writeln!(out, "{}{}", pad(depth), simple(s));
        }
    }
}

fn flatten(items: &[BSubst]) -> Vec<BSubst> {
    let mut out = Vec::new();
    for it in items {
        match it {
            BSubst::Par(inner) => out.extend(flatten(inner)),
            BSubst::Data(Subst::Parallel(inner)) => {
                let inner: Vec<BSubst> = inner.iter().cloned().map(BSubst::Data).collect();
                out.extend(flatten(&inner))
            }
            BSubst::Data(Subst::Skip) => {}
            _ => out.push(it.clone()),
        }
    }
    out
}

fn simple(s: &BSubst) -> String {
    match s {
        BSubst::Data(d) => data_subst(d),
        BSubst::Call { op, args } if args.is_empty() => op.clone(),
        BSubst::Call { op, args } => {
            let a: Vec<String> = args.iter().map(bexpr).collect();
            format!("{op}({})", a.join(", "))
        }
        other => {
            let mut out = String::new();
            subst_lines(other, 0, &mut out);
            out.trim_end().to_string()
        }
    }
}

/// Single-line B text of a data substitution; `x :| (P)` becomes
/// `x : (P)` with `x$0` for the before-value.
pub fn data_subst(s: &Subst) -> String {
    match s {
        Subst::Skip => "skip".into(),
        Subst::Assign(x, e) => format!("{x} := {}", bexpr(e)),
        Subst::AssignAt(f, at, e) => format!("{f}({}) := {}", bexpr(at), bexpr(e)),
        Subst::Such(x, p) => format!("{x} : ({})", bpred(&unprime(p, x))),
        Subst::Parallel(items) => {
            let parts: Vec<String> = items.iter().map(data_subst).collect();
            parts.join(" || ")
        }
        Subst::Select(branches) => {
            let mut out = String::from("SELECT");
            for (i, (g, b)) in branches.iter().enumerate() {
                let kw = if i == 0 { "" } else { " WHEN" };
                let _ = write!(out, "{kw} {} THEN {}", bpred(g), data_subst(b));
            }
            out.push_str(" END");
            out
        }
    }
}
