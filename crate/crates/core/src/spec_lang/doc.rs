use crate::control::AstdNode;
use crate::data::{EventDef, Expr, Pred, Type};
use crate::diag::Span;

/// A parsed specification file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDoc {
    pub name: String,
    pub level: Option<u32>,
    pub options: Vec<String>,
    pub sorts: Vec<SortDecl>,
    pub constants: Vec<ConstDecl>,
    pub variables: Vec<VarDecl>,
    pub invariants: Vec<NamedPred>,
    pub theorems: Vec<Theorem>,
    pub events: Vec<EventDecl>,
    pub astd: Option<AstdNode>,
    pub span: Span,
}

pub const OPT_WEAK_SYNC_STRICT: &str = "weak-sync-strict";

impl SpecDoc {
    pub fn has_option(&self, opt: &str) -> bool {
        self.options.iter().any(|o| o == opt)
    }

    pub fn event(&self, label: &str) -> Option<&EventDecl> {
        self.events.iter().find(|e| e.def.label == label)
    }

    pub fn variable(&self, name: &str) -> Option<&VarDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn sort(&self, name: &str) -> Option<&SortDecl> {
        self.sorts.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    /// Declaration order is the sort's linear order.
    pub elements: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstDef {
    /// Strict order `{a |-> b | a declared before b}` on a sort.
    Order(String),
    Expr(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub def: ConstDef,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: Type,
    pub init: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPred {
    pub name: String,
    pub pred: Pred,
    pub span: Span,
}

/// Two-state assertion checked on every transition labelled `event`; the
/// event's parameters are in scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem {
    pub name: String,
    pub event: String,
    pub pred: Pred,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDecl {
    pub def: EventDef,
    /// Control-only label: no effect on the data.
    pub pure: bool,
    pub span: Span,
}
