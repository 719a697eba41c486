use std::collections::BTreeSet;

use super::doc::{ConstDecl, ConstDef, EventDecl, NamedPred, SortDecl, SpecDoc, Theorem, VarDecl};
use super::lexer::{lex, Tok, Token};
use crate::control::{
    ArgPattern, Arrow, AstdNode, Automaton, EventPattern, Quant, QuantKind, Transition,
};
use crate::data::{CmpOp, EventDef, Expr, Param, Pred, SetOp, Subst, Type};
use crate::diag::{Diagnostic, Span};

const MAX_DEPTH: usize = 200;

const KEYWORDS: &[&str] = &[
    "SPEC", "LEVEL", "END", "OPTIONS", "SORTS", "CONSTANTS", "VARIABLES", "INVARIANTS", "THEOREMS",
    "EVENTS", "ASTD", "EVENT", "PURE", "WHERE", "THEN", "ON", "ORDER", "AUT", "INIT", "FINAL",
    "STATE", "TRANS", "GUARD", "ELEM", "KLEENE", "WSYNC", "WHEN", "SELECT", "POW", "skip", "dom",
    "ran", "not", "or", "btrue", "bfalse",
];

const SECTIONS: &[&str] = &[
    "OPTIONS", "SORTS", "CONSTANTS", "VARIABLES", "INVARIANTS", "THEOREMS", "EVENTS", "ASTD", "END",
];

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    /// Quantification variables visible in the ASTD being parsed.
    scope: Vec<String>,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            depth: 0,
            scope: Vec::new(),
        })
    }

    pub fn with_scope(mut self, vars: &[&str]) -> Self {
        self.scope = vars.iter().map(|s| s.to_string()).collect();
        self
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.at_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::error(
            self.span(),
            format!("expected {what}, found {}", Self::describe(self.peek())),
        ))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// State names may be identifiers or dotted numbers.
    fn state_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Num(s) => {
                self.advance();
                Ok(s)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("a state name"),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::error(self.span(), "nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    // ---- documents -------------------------------------------------------

    pub fn document(&mut self) -> Result<SpecDoc, Vec<Diagnostic>> {
        if matches!(self.peek(), Tok::Eof) {
            return Err(vec![Diagnostic::error(self.span(), "empty specification")]);
        }
        let span = self.span();
        let mut errors = Vec::new();
        let header = (|| -> PResult<(String, Option<u32>)> {
            self.expect_kw("SPEC")?;
            let name = self.ident()?;
            let level = if self.eat_kw("LEVEL") {
                match self.peek().clone() {
                    Tok::Num(n) if !n.contains('.') => {
                        self.advance();
                        Some(n.parse().map_err(|_| {
                            Diagnostic::error(span, format!("level `{n}` out of range"))
                        })?)
                    }
                    _ => return self.unexpected("a level number"),
                }
            } else {
                None
            };
            Ok((name, level))
        })();
        let (name, level) = match header {
            Ok(h) => h,
            Err(e) => return Err(vec![e]),
        };
        let mut doc = SpecDoc {
            name,
            level,
            options: Vec::new(),
            sorts: Vec::new(),
            constants: Vec::new(),
            variables: Vec::new(),
            invariants: Vec::new(),
            theorems: Vec::new(),
            events: Vec::new(),
            astd: None,
            span,
        };
        loop {
            let kw = match self.peek() {
                Tok::Ident(k) if SECTIONS.contains(&k.as_str()) => k.clone(),
                Tok::Eof => {
                    errors.push(Diagnostic::error(self.span(), "expected `END`, found end of input"));
                    break;
                }
                _ => {
                    let e = self
                        .unexpected::<()>("a section keyword or `END`")
                        .unwrap_err();
                    errors.push(e);
                    self.recover();
                    continue;
                }
            };
            let sect_span = self.span();
            self.advance();
            match kw.as_str() {
                "END" => {
                    if let Err(e) = self.expect_eof() {
                        errors.push(e);
                    }
                    break;
                }
                "ASTD" => {
                    if doc.astd.is_some() {
                        errors.push(Diagnostic::error(sect_span, "duplicate ASTD section"));
                    }
                    match self.astd() {
                        Ok(a) => doc.astd = Some(a),
                        Err(e) => {
                            errors.push(e);
                            self.skip_to_section();
                        }
                    }
                }
                _ => self.section_items(&kw, &mut doc, &mut errors),
            }
        }
        if errors.is_empty() {
            Ok(doc)
        } else {
            Err(errors)
        }
    }

    fn at_section(&self) -> bool {
        match self.peek() {
            // `END` also closes events and SELECTs; only a final one ends the document.
            Tok::Ident(k) if k == "END" => {
                matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Eof) | None)
            }
            Tok::Ident(k) => SECTIONS.contains(&k.as_str()),
            Tok::Eof => true,
            _ => false,
        }
    }

    /// Skips past the next `;`, stopping early at a section keyword.
    fn recover(&mut self) {
        while !self.at_section() {
            if self.eat_sym(";") {
                return;
            }
            self.advance();
        }
    }

    fn skip_to_section(&mut self) {
        while !self.at_section() {
            self.advance();
        }
    }

    fn section_items(&mut self, kw: &str, doc: &mut SpecDoc, errors: &mut Vec<Diagnostic>) {
        while !self.at_section() {
            let r = match kw {
                "OPTIONS" => self.option_item(doc),
                "SORTS" => self.sort_item(doc),
                "CONSTANTS" => self.const_item(doc),
                "VARIABLES" => self.var_item(doc),
                "INVARIANTS" => self.invariant_item(doc),
                "THEOREMS" => self.theorem_item(doc),
                "EVENTS" => self.event_item(doc),
                _ => unreachable!("not an item section: {kw}"),
            };
            if let Err(e) = r {
                errors.push(e);
                self.recover();
            }
        }
    }

    fn option_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        loop {
            let mut name = self.ident()?;
            while self.eat_sym("-") {
                name.push('-');
                name.push_str(&self.ident()?);
            }
            doc.options.push(name);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(";")
    }

    fn sort_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        let name = self.ident()?;
        self.expect_sym("=")?;
        self.expect_sym("{")?;
        let mut elements = Vec::new();
        if !self.at_sym("}") {
            loop {
                elements.push(self.ident()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        self.expect_sym(";")?;
        doc.sorts.push(SortDecl {
            name,
            elements,
            span,
        });
        Ok(())
    }

    fn const_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        let name = self.ident()?;
        self.expect_sym("=")?;
        let def = if self.eat_kw("ORDER") {
            self.expect_sym("(")?;
            let s = self.ident()?;
            self.expect_sym(")")?;
            ConstDef::Order(s)
        } else {
            ConstDef::Expr(self.expr()?)
        };
        self.expect_sym(";")?;
        doc.constants.push(ConstDecl { name, def, span });
        Ok(())
    }

    fn var_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        let name = self.ident()?;
        self.expect_sym(":")?;
        let ty = self.ty()?;
        self.expect_sym(":=")?;
        let init = self.expr()?;
        self.expect_sym(";")?;
        doc.variables.push(VarDecl {
            name,
            ty,
            init,
            span,
        });
        Ok(())
    }

    fn invariant_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        let name = self.ident()?;
        self.expect_sym(":")?;
        let pred = self.pred()?;
        self.expect_sym(";")?;
        doc.invariants.push(NamedPred { name, pred, span });
        Ok(())
    }

    fn theorem_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        let name = self.ident()?;
        self.expect_kw("ON")?;
        let event = self.ident()?;
        self.expect_sym(":")?;
        let pred = self.pred()?;
        self.expect_sym(";")?;
        doc.theorems.push(Theorem {
            name,
            event,
            pred,
            span,
        });
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.eat_sym("(") {
            if !self.at_sym(")") {
                loop {
                    let name = self.ident()?;
                    self.expect_sym(":")?;
                    let sort = self.ident()?;
                    params.push(Param { name, sort });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
        }
        Ok(params)
    }

    fn event_item(&mut self, doc: &mut SpecDoc) -> PResult<()> {
        let span = self.span();
        if self.eat_kw("PURE") {
            let label = self.ident()?;
            let params = self.params()?;
            self.expect_sym(";")?;
            doc.events.push(EventDecl {
                def: EventDef {
                    label,
                    params,
                    guard: Pred::True,
                    action: Subst::Skip,
                },
                pure: true,
                span,
            });
            return Ok(());
        }
        self.expect_kw("EVENT")?;
        let label = self.ident()?;
        let params = self.params()?;
        let guard = if self.eat_kw("WHERE") {
            self.pred()?
        } else {
            Pred::True
        };
        let action = if self.eat_kw("THEN") {
            self.subst()?
        } else {
            Subst::Skip
        };
        self.expect_kw("END")?;
        self.expect_sym(";")?;
        doc.events.push(EventDecl {
            def: EventDef {
                label,
                params,
                guard,
                action,
            },
            pure: false,
            span,
        });
        Ok(())
    }

    // ---- types -----------------------------------------------------------

    pub fn ty(&mut self) -> PResult<Type> {
        self.enter()?;
        let r = self.ty_inner();
        self.leave();
        r
    }

    fn ty_inner(&mut self) -> PResult<Type> {
        let left = self.prod_ty()?;
        let ctor: Option<fn(Box<Type>, Box<Type>) -> Type> = if self.eat_sym("+->") {
            Some(Type::PFun)
        } else if self.eat_sym("-->") {
            Some(Type::TFun)
        } else if self.eat_sym("<->") {
            Some(Type::Rel)
        } else {
            None
        };
        match ctor {
            Some(c) => Ok(c(Box::new(left), Box::new(self.ty()?))),
            None => Ok(left),
        }
    }

    fn prod_ty(&mut self) -> PResult<Type> {
        let mut t = self.base_ty()?;
        while self.eat_sym("*") {
            t = Type::Prod(Box::new(t), Box::new(self.base_ty()?));
        }
        Ok(t)
    }

    fn base_ty(&mut self) -> PResult<Type> {
        if self.eat_kw("POW") {
            self.expect_sym("(")?;
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(Type::Pow(Box::new(t)));
        }
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if self.eat_kw("BOOL") {
            return Ok(Type::Bool);
        }
        Ok(Type::Sort(self.ident()?))
    }

    // ---- predicates ------------------------------------------------------

    pub fn pred(&mut self) -> PResult<Pred> {
        self.enter()?;
        let r = self.implies();
        self.leave();
        r
    }

    fn implies(&mut self) -> PResult<Pred> {
        let a = self.disjunction()?;
        if self.eat_sym("=>") {
            let b = self.pred()?;
            return Ok(Pred::Implies(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> PResult<Pred> {
        let mut a = self.conjunction()?;
        while self.eat_kw("or") {
            let b = self.conjunction()?;
            a = Pred::Or(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> PResult<Pred> {
        let mut a = self.unary()?;
        while self.eat_sym("&") {
            let b = self.unary()?;
            a = Pred::And(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn unary(&mut self) -> PResult<Pred> {
        self.enter()?;
        let r = self.unary_inner();
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<Pred> {
        if self.eat_kw("not") {
            return Ok(Pred::Not(Box::new(self.unary()?)));
        }
        if self.eat_kw("btrue") {
            return Ok(Pred::True);
        }
        if self.eat_kw("bfalse") {
            return Ok(Pred::False);
        }
        let universal = self.at_sym("!");
        if universal || self.at_sym("#") {
            self.advance();
            let x = self.ident()?;
            self.expect_sym(":")?;
            let bound = self.expr()?;
            self.expect_sym(".")?;
            let body = self.unary()?;
            return Ok(if universal {
                Pred::Forall(x, bound, Box::new(body))
            } else {
                Pred::Exists(x, bound, Box::new(body))
            });
        }
        if self.at_sym("(") {
            // Either a parenthesised predicate or a comparison whose left
            // operand starts with a parenthesis.
            let save = self.pos;
            let as_cmp = self.comparison();
            if as_cmp.is_ok() {
                return as_cmp;
            }
            let cmp_pos = self.pos;
            self.pos = save;
            self.advance();
            let inner = self.pred().and_then(|p| self.expect_sym(")").map(|_| p));
            return match (inner, as_cmp) {
                (Ok(p), _) => Ok(p),
                (Err(e), Err(c)) => {
                    if cmp_pos > self.pos {
                        Err(c)
                    } else {
                        Err(e)
                    }
                }
                (Err(e), Ok(_)) => Err(e),
            };
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Pred> {
        let a = self.expr()?;
        let op = match self.peek() {
            Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("/=") => CmpOp::Neq,
            Tok::Sym(":") => CmpOp::In,
            Tok::Sym("/:") => CmpOp::NotIn,
            Tok::Sym("<:") => CmpOp::Subset,
            _ => return self.unexpected("a comparison operator"),
        };
        self.advance();
        let b = self.expr()?;
        Ok(Pred::Cmp(op, a, b))
    }

    // ---- expressions -----------------------------------------------------

    pub fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.pair_expr();
        self.leave();
        r
    }

    fn pair_expr(&mut self) -> PResult<Expr> {
        let mut a = self.set_expr()?;
        while self.eat_sym("|->") {
            let b = self.set_expr()?;
            a = Expr::Pair(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn set_expr(&mut self) -> PResult<Expr> {
        let mut a = self.postfix()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("\\/") => SetOp::Union,
                Tok::Sym("/\\") => SetOp::Inter,
                Tok::Sym("-") => SetOp::Diff,
                Tok::Sym("<+") => SetOp::Override,
                Tok::Sym("<<|") => SetOp::DomSub,
                Tok::Sym("*") => SetOp::Product,
                _ => return Ok(a),
            };
            self.advance();
            let b = self.postfix()?;
            a = Expr::Bin(op, Box::new(a), Box::new(b));
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.at_sym("(") {
            self.advance();
            let arg = self.expr()?;
            self.expect_sym(")")?;
            e = Expr::App(Box::new(e), Box::new(arg));
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.primary_inner();
        self.leave();
        r
    }

    fn primary_inner(&mut self) -> PResult<Expr> {
        if self.eat_kw("dom") || self.at_kw("ran") {
            let is_dom = !self.eat_kw("ran");
            self.expect_sym("(")?;
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(if is_dom {
                Expr::Dom(Box::new(e))
            } else {
                Expr::Ran(Box::new(e))
            });
        }
        if self.eat_kw("TRUE") {
            return Ok(Expr::Bool(true));
        }
        if self.eat_kw("FALSE") {
            return Ok(Expr::Bool(false));
        }
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        if self.eat_sym("{") {
            let mut items = Vec::new();
            if !self.at_sym("}") {
                loop {
                    items.push(self.expr()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
            return Ok(Expr::SetLit(items));
        }
        let name = match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                s
            }
            _ => return self.unexpected("an expression"),
        };
        if self.eat_sym("'") {
            return Ok(Expr::Primed(name));
        }
        Ok(Expr::Ident(name))
    }

    // ---- substitutions ---------------------------------------------------

    pub fn subst(&mut self) -> PResult<Subst> {
        self.enter()?;
        let r = self.parallel();
        self.leave();
        r
    }

    fn parallel(&mut self) -> PResult<Subst> {
        let mut items = vec![self.basic_subst()?];
        while self.eat_sym("||") {
            items.push(self.basic_subst()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Subst::Parallel(items)
        })
    }

    fn basic_subst(&mut self) -> PResult<Subst> {
        if self.eat_kw("skip") {
            return Ok(Subst::Skip);
        }
        if self.eat_sym("(") {
            let s = self.subst()?;
            self.expect_sym(")")?;
            return Ok(s);
        }
        if self.eat_kw("SELECT") {
            let mut branches = Vec::new();
            let g = self.pred()?;
            self.expect_kw("THEN")?;
            branches.push((g, self.subst()?));
            while self.eat_kw("WHEN") {
                let g = self.pred()?;
                self.expect_kw("THEN")?;
                branches.push((g, self.subst()?));
            }
            self.expect_kw("END")?;
            return Ok(Subst::Select(branches));
        }
        let x = self.ident()?;
        if self.eat_sym(":=") {
            return Ok(Subst::Assign(x, self.expr()?));
        }
        if self.eat_sym(":|") {
            return Ok(Subst::Such(x, self.pred()?));
        }
        if self.eat_sym("(") {
            let at = self.expr()?;
            self.expect_sym(")")?;
            self.expect_sym(":=")?;
            return Ok(Subst::AssignAt(x, at, self.expr()?));
        }
        self.unexpected("`:=`, `:|` or `(`")
    }

    // ---- ASTDs -----------------------------------------------------------

    pub fn astd(&mut self) -> PResult<AstdNode> {
        self.enter()?;
        let r = self.astd_inner();
        self.leave();
        r
    }

    fn astd_inner(&mut self) -> PResult<AstdNode> {
        if self.eat_kw("ELEM") {
            return Ok(AstdNode::Elem);
        }
        if self.eat_kw("KLEENE") {
            self.expect_sym("(")?;
            let body = self.astd()?;
            self.expect_sym(")")?;
            return Ok(AstdNode::Kleene(Box::new(body)));
        }
        if self.at_sym("(") {
            self.advance();
            let a = self.astd()?;
            self.expect_sym(")")?;
            return Ok(a);
        }
        let span = self.span();
        if self.eat_kw("AUT") {
            return self.automaton(span);
        }
        let kind = if self.eat_sym("|||") {
            QuantKind::Interleave
        } else if self.eat_sym("||") {
            QuantKind::Sync
        } else if self.eat_kw("WSYNC") {
            QuantKind::WeakSync
        } else {
            return self.unexpected("an ASTD");
        };
        let var = self.ident()?;
        self.expect_sym(":")?;
        let domain = self.ident()?;
        let mut sync_labels = BTreeSet::new();
        let mut sync_pred = Pred::True;
        if kind != QuantKind::Interleave {
            self.expect_sym("{")?;
            if !self.at_sym("}") {
                loop {
                    sync_labels.insert(self.ident()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
        }
        if kind == QuantKind::WeakSync {
            self.expect_kw("WHEN")?;
            self.expect_sym("(")?;
            sync_pred = self.pred()?;
            self.expect_sym(")")?;
        }
        self.expect_sym(".")?;
        self.scope.push(var.clone());
        let body = self.astd();
        self.scope.pop();
        Ok(AstdNode::Quant(Quant {
            kind,
            var,
            domain,
            sync_labels,
            sync_pred,
            body: Box::new(body?),
            span,
        }))
    }

    fn automaton(&mut self, span: Span) -> PResult<AstdNode> {
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut states: Vec<(String, AstdNode)> = Vec::new();
        let mut init: Option<String> = None;
        let mut finals = BTreeSet::new();
        let mut transitions = Vec::new();
        while !self.eat_sym("}") {
            let item_span = self.span();
            if self.eat_kw("INIT") {
                let n = self.state_name()?;
                if init.is_some() {
                    return Err(Diagnostic::error(
                        item_span,
                        format!("automaton `{name}` has more than one INIT"),
                    ));
                }
                init = Some(n);
            } else if self.eat_kw("FINAL") {
                loop {
                    finals.insert(self.state_name()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            } else if self.eat_kw("STATE") {
                let n = self.state_name()?;
                let body = if self.eat_sym("=") {
                    self.astd()?
                } else {
                    AstdNode::Elem
                };
                states.push((n, body));
            } else if self.eat_kw("TRANS") {
                transitions.push(self.transition(item_span)?);
            } else {
                return self.unexpected("`INIT`, `FINAL`, `STATE`, `TRANS` or `}`");
            }
            self.expect_sym(";")?;
        }
        let init = init.ok_or_else(|| {
            Diagnostic::error(span, format!("automaton `{name}` has no INIT"))
        })?;
        Ok(AstdNode::Automaton(Automaton {
            name,
            states,
            init,
            finals,
            transitions,
            span,
        }))
    }

    fn transition(&mut self, span: Span) -> PResult<Transition> {
        let from = self.state_name()?;
        let from_sub = if self.eat_sym("/") {
            Some(self.state_name()?)
        } else {
            None
        };
        self.expect_sym("->")?;
        let to = self.state_name()?;
        let to_sub = if self.eat_sym("/") {
            Some(self.state_name()?)
        } else {
            None
        };
        let arrow = match (from_sub, to_sub) {
            (None, None) => Arrow::Loc { from, to },
            (None, Some(to_sub)) => Arrow::ToSub { from, to, to_sub },
            (Some(from_sub), None) => Arrow::FromSub { from, from_sub, to },
            (Some(_), Some(_)) => {
                return Err(Diagnostic::error(
                    span,
                    "a transition cannot both leave and enter substates",
                ))
            }
        };
        self.expect_sym(":")?;
        let label = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            if !self.at_sym(")") {
                loop {
                    let a = self.ident()?;
                    args.push(if self.scope.contains(&a) {
                        ArgPattern::Var(a)
                    } else {
                        ArgPattern::Atom(a)
                    });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
        }
        let guard = if self.eat_kw("GUARD") {
            self.expect_sym("(")?;
            let g = self.pred()?;
            self.expect_sym(")")?;
            g
        } else {
            Pred::True
        };
        let final_flag = self.eat_kw("FINAL");
        Ok(Transition {
            arrow,
            event: EventPattern { label, args },
            guard,
            final_flag,
            span,
        })
    }
}
