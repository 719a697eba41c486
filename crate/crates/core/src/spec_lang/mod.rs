//! Textual specification language: lexer, parser, pretty-printer and
//! static checker. The grammar is documented in `docs/grammar.md`.

mod check;
mod doc;
mod lexer;
mod parser;
mod render;

#[cfg(test)]
mod tests;

use std::path::Path;

pub use check::check_static;
pub use doc::{
    ConstDecl, ConstDef, EventDecl, NamedPred, SortDecl, SpecDoc, Theorem, VarDecl,
    OPT_WEAK_SYNC_STRICT,
};
pub use render::{expr as render_expr, pred as render_pred, render, subst as render_subst, ty as render_type};

use crate::control::AstdNode;
use crate::data::{Expr, Pred, Subst, Type};
use crate::diag::Diagnostic;
use parser::Parser;

/// Syntax only; see [`load`] for parsing plus static checks.
pub fn parse(src: &str) -> Result<SpecDoc, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|e| vec![e])?;
    p.document()
}

/// Parses and statically checks a document. Warnings are dropped; any
/// error fails the load.
pub fn load(src: &str) -> Result<SpecDoc, Vec<Diagnostic>> {
    let doc = parse(src)?;
    let errors: Vec<Diagnostic> = check_static(&doc)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect();
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{}", render_diagnostics(.path, .diagnostics))]
    Invalid {
        path: String,
        diagnostics: Vec<Diagnostic>,
    },
}

fn render_diagnostics(path: &str, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{path}:{d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn load_file(path: impl AsRef<Path>) -> Result<SpecDoc, LoadError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: shown.clone(),
        source,
    })?;
    load(&src).map_err(|diagnostics| LoadError::Invalid {
        path: shown,
        diagnostics,
    })
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, Diagnostic>) -> Result<T, Diagnostic> {
    let mut p = Parser::new(src)?;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

pub fn parse_pred(src: &str) -> Result<Pred, Diagnostic> {
    whole(src, Parser::pred)
}

pub fn parse_expr(src: &str) -> Result<Expr, Diagnostic> {
    whole(src, Parser::expr)
}

pub fn parse_subst(src: &str) -> Result<Subst, Diagnostic> {
    whole(src, Parser::subst)
}

pub fn parse_type(src: &str) -> Result<Type, Diagnostic> {
    whole(src, Parser::ty)
}

/// Parses an ASTD with `scope` as enclosing quantification variables.
pub fn parse_astd(src: &str, scope: &[&str]) -> Result<AstdNode, Diagnostic> {
    let mut p = Parser::new(src)?.with_scope(scope);
    let v = p.astd()?;
    p.expect_eof()?;
    Ok(v)
}
