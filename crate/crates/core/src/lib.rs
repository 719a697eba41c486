//! Algebraic state-transition diagrams coupled with a B-like data layer.
//!
//! The crate is organised in layers: [`data`] evaluates predicates and
//! substitutions over finite sorts, [`control`] gives the step relation of
//! the ASTD operators, [`spec_lang`] reads specification files, [`engine`]
//! combines both layers and explores the resulting state space,
//! [`refinement`] compares systems, and [`translate`] emits B machines.

pub mod control;
pub mod data;
pub mod diag;
pub mod engine;
pub mod refinement;
pub mod spec_lang;
pub mod translate;
