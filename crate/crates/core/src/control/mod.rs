//! Control layer: ASTD structure, states and the step relation.

mod ast;
mod semantics;
mod state;

#[cfg(test)]
mod tests;

pub use ast::{ArgPattern, Arrow, AstdNode, Automaton, EventPattern, Quant, QuantKind, Transition};
pub use semantics::{
    control_step, init, is_final, matches, ControlError, GuardContext, StepOptions,
};
pub use state::{ControlState, Event};
