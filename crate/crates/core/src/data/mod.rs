//! Finite-domain interpreter for the B-like data layer.
//!
//! Values are drawn from finite enumerated sorts, so every `x :| (P)` is
//! decided by enumerating the declared type of `x`.

mod ast;
mod eval;
mod subst;
mod types;
mod universe;
mod value;

#[cfg(test)]
mod tests;

pub use ast::{CmpOp, EventDef, Expr, Param, Pred, SetOp, Subst, Type};
pub use eval::{DataState, Env, EvalCtx, Schema};
pub use types::MAX_CANDIDATES;
pub use universe::Universe;
pub use value::{Atom, Value, ValueDisplay};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("`{func}` applied outside its domain (argument {arg})")]
    OutsideDomain { func: String, arg: String },
    #[error("`{0}` is not single-valued at the argument")]
    NotFunctional(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("primed variable `{0}'` outside a two-state context")]
    PrimedOutsideTwoState(String),
    #[error("parallel branches both write `{0}`")]
    WriteConflict(String),
    #[error("`{var}` := {value} leaves the declared type")]
    Typing { var: String, value: String },
    #[error("candidate space too large to enumerate ({0})")]
    TooLarge(String),
    #[error("event `{label}` expects {expected} arguments, got {got}")]
    Arity {
        label: String,
        expected: usize,
        got: usize,
    },
    #[error("event `{0}` fired while its guard is false")]
    Disabled(String),
}
