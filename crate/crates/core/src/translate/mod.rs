//! Translation into classical B.
//!
//! Two backends share a data machine (one `<label>_act` operation per
//! event): [`translate_state_encoding`] encodes the ASTD state in
//! variables, [`translate_enabled_sets`] keeps one set of enabled
//! instances per label. [`Interpreter`] executes the generated machines so
//! the output can be compared with the engine.

mod enabled;
mod interp;
mod machine;
mod print;
mod state;

#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::data::{CmpOp, EvalError, Expr, Pred};
use crate::diag::Diagnostic;
use crate::engine::EngineError;
use crate::spec_lang::{ConstDef, SpecDoc};

pub use enabled::{
    control_graph, control_lts_of_enabled_sets, translate_enabled_sets, EnabledSets, Rule,
};
pub use interp::{check_fidelity, BLts, Fidelity, Interpreter};
pub use machine::{render_machine, render_operation, BSpec, BSubst, Machine, Operation};
pub use print::{bexpr, bpred};
pub use state::{state_ident, translate_state_encoding, CtlVar, StateEncoding};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("cannot translate: {}", list(.0))]
    Unsupported(Vec<Diagnostic>),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Machine(String),
}

fn list(d: &[Diagnostic]) -> String {
    let items: Vec<String> = d.iter().map(|d| d.to_string()).collect();
    items.join("; ")
}

/// The data part: sorts, constants, variables, invariants and one
/// operation per non-pure event, its guard as precondition.
pub fn data_machine(doc: &SpecDoc) -> Machine {
    let mut m = Machine {
        name: format!("{}_data", doc.name),
        ..Default::default()
    };
    m.sets = doc
        .sorts
        .iter()
        .map(|s| (s.name.clone(), s.elements.clone()))
        .collect();
    for c in &doc.constants {
        let value = match &c.def {
            ConstDef::Expr(e) => e.clone(),
            ConstDef::Order(sort) => {
                let elems = doc.sort(sort).map(|s| s.elements.clone()).unwrap_or_default();
                let mut pairs = Vec::new();
                for (i, a) in elems.iter().enumerate() {
                    for b in &elems[i + 1..] {
                        pairs.push(Expr::pair(Expr::ident(a), Expr::ident(b)));
                    }
                }
                Expr::SetLit(pairs)
            }
        };
        m.constants.push((c.name.clone(), value));
    }
    m.variables = doc
        .variables
        .iter()
        .map(|v| (v.name.clone(), v.ty.clone()))
        .collect();
    m.invariant = doc
        .invariants
        .iter()
        .map(|i| (i.name.clone(), i.pred.clone()))
        .collect();
    m.init = doc
        .variables
        .iter()
        .map(|v| (v.name.clone(), v.init.clone()))
        .collect();
    for e in doc.events.iter().filter(|e| !e.pure) {
        let mut pre: Vec<Pred> = e
            .def
            .params
            .iter()
            .map(|p| Pred::cmp(CmpOp::In, Expr::ident(&p.name), Expr::ident(&p.sort)))
            .collect();
        if e.def.guard != Pred::True {
            pre.push(e.def.guard.clone());
        }
        m.operations.push(Operation {
            name: format!("{}_act", e.def.label),
            params: e.def.params.clone(),
            pre,
            body: BSubst::Data(e.def.action.clone()),
        });
    }
    m
}
