use super::*;
use crate::control::{ArgPattern, Arrow, AstdNode, QuantKind};
use crate::data::{CmpOp, Expr, Pred, SetOp, Subst, Type};

const SMALL: &str = r#"
SPEC small LEVEL 1
SORTS
  TRAIN = {t1, t2};
  TRACK = {p1, p2};
CONSTANTS
  is_behind = ORDER(TRACK);
VARIABLES
  position : TRAIN +-> TRACK := {};
INVARIANTS
  inv : !u : dom(position) . (position(u) : TRACK);
EVENTS
  EVENT go(tt : TRAIN)
  WHERE tt /: dom(position)
  THEN position(tt) := p1
  END;
  PURE ping;
ASTD
  ||| t : TRAIN .
    AUT A {
      INIT a;
      FINAL a;
      STATE a;
      STATE b;
      TRANS a -> b : go(t);
      TRANS b -> a : ping FINAL;
    }
END
"#;

#[test]
fn parses_small_document() {
    let doc = load(SMALL).unwrap();
    assert_eq!(doc.name, "small");
    assert_eq!(doc.level, Some(1));
    assert_eq!(doc.sorts[1].elements, vec!["p1", "p2"]);
    assert_eq!(
        doc.variables[0].ty,
        Type::PFun(Box::new(Type::Sort("TRAIN".into())), Box::new(Type::Sort("TRACK".into())))
    );
    assert!(doc.events[1].pure);
    let Some(AstdNode::Quant(q)) = &doc.astd else {
        panic!("expected quantification")
    };
    assert_eq!(q.kind, QuantKind::Interleave);
    let AstdNode::Automaton(a) = &*q.body else {
        panic!("expected automaton")
    };
    assert_eq!(a.transitions[0].event.args, vec![ArgPattern::Var("t".into())]);
    assert!(a.transitions[1].final_flag);
}

#[test]
fn render_round_trips() {
    let doc = parse(SMALL).unwrap();
    let text = render(&doc);
    let again = parse(&text).unwrap();
    assert_eq!(doc, again);
    assert_eq!(render(&again), text);
}

#[test]
fn empty_specification() {
    let err = parse("  // nothing\n").unwrap_err();
    assert_eq!(err[0].message, "empty specification");
}

#[test]
fn unknown_event_in_transition() {
    let src = SMALL.replace("TRANS a -> b : go(t);", "TRANS a -> b : jump(t);");
    let diags = check_static(&parse(&src).unwrap());
    let d = diags.iter().find(|d| d.message.contains("jump")).unwrap();
    assert!(d.message.contains("undeclared event"));
    assert_eq!(d.span.line, 25);
}

#[test]
fn arity_mismatch() {
    let src = SMALL.replace("EVENT go(tt : TRAIN)", "EVENT go(tt : TRAIN, uu : TRAIN)");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("takes 2 argument(s)")), "{diags:?}");
}

#[test]
fn duplicate_names() {
    let src = SMALL.replace(
        "position : TRAIN +-> TRACK := {};",
        "position : TRAIN +-> TRACK := {};\n  position : TRAIN +-> TRACK := {};",
    );
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("duplicate name `position`")));
    let src = SMALL.replace("PURE ping;", "PURE ping;\n  PURE TRAIN;");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("duplicate name `TRAIN`")));
}

#[test]
fn unknown_identifiers_and_primes() {
    let src = SMALL.replace("position(u) : TRACK", "speed(u) : TRACK");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("unknown identifier `speed`")));
    let src = SMALL.replace("position(u) : TRACK", "position'(u) : TRACK");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("primed variable")));
    let src = SMALL.replace("TRANS a -> b : go(t);", "TRANS a -> b : go(t9);");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("unknown identifier `t9`")));
}

#[test]
fn automaton_structure_errors() {
    let src = SMALL.replace("TRANS a -> b : go(t);", "TRANS a -> c : go(t);");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("unknown state `c`")));
    let src = SMALL.replace("INIT a;", "INIT z;");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("INIT state `z`")));
    let src = SMALL.replace("TRANS a -> b : go(t);", "TRANS a -> b/x : go(t);");
    let diags = check_static(&parse(&src).unwrap());
    assert!(diags.iter().any(|d| d.message.contains("not an automaton")));
}

#[test]
fn syntax_errors_are_located_and_recovered() {
    let src = SMALL
        .replace("TRACK = {p1, p2};", "TRACK = {p1 p2};")
        .replace("inv : !u", "inv : !!u");
    let errs = parse(&src).unwrap_err();
    assert_eq!(errs.len(), 2, "{errs:?}");
    assert_eq!(errs[0].span.line, 5);
    assert_eq!(errs[1].span.line, 11);
}

#[test]
fn predicate_precedence() {
    let p = parse_pred("a = b & c = d or e = f => g = h").unwrap();
    let eq = |x: &str, y: &str| Pred::Cmp(CmpOp::Eq, Expr::ident(x), Expr::ident(y));
    assert_eq!(
        p,
        Pred::Implies(
            Box::new(Pred::Or(
                Box::new(Pred::And(Box::new(eq("a", "b")), Box::new(eq("c", "d")))),
                Box::new(eq("e", "f"))
            )),
            Box::new(eq("g", "h"))
        )
    );
}

#[test]
fn parenthesised_comparison_operands() {
    let p = parse_pred("(a |-> b) : r").unwrap();
    assert_eq!(
        p,
        Pred::Cmp(CmpOp::In, Expr::pair(Expr::ident("a"), Expr::ident("b")), Expr::ident("r"))
    );
    let p = parse_pred("(a |-> b : r)").unwrap();
    assert!(matches!(p, Pred::Cmp(CmpOp::In, Expr::Pair(..), _)));
    let p = parse_pred("((x = y))").unwrap();
    assert_eq!(p, Pred::Cmp(CmpOp::Eq, Expr::ident("x"), Expr::ident("y")));
}

#[test]
fn expressions() {
    let e = parse_expr("{tt} <<| position <+ {tt |-> pp}").unwrap();
    assert_eq!(
        e,
        Expr::bin(
            SetOp::Override,
            Expr::bin(SetOp::DomSub, Expr::SetLit(vec![Expr::ident("tt")]), Expr::ident("position")),
            Expr::SetLit(vec![Expr::pair(Expr::ident("tt"), Expr::ident("pp"))])
        )
    );
    assert_eq!(parse_expr("mal'(u)").unwrap(), Expr::app(Expr::Primed("mal".into()), Expr::ident("u")));
    assert!(parse_expr("dom position").is_err());
}

#[test]
fn substitutions() {
    let s = parse_subst("x := a || f(b) := c || y :| (y' = x)").unwrap();
    let Subst::Parallel(items) = s else { panic!() };
    assert_eq!(items.len(), 3);
    assert!(matches!(items[1], Subst::AssignAt(..)));
    assert!(matches!(items[2], Subst::Such(..)));
    let s = parse_subst("SELECT a = b THEN skip WHEN btrue THEN x := c END").unwrap();
    let Subst::Select(branches) = s else { panic!() };
    assert_eq!(branches.len(), 2);
}

#[test]
fn types() {
    assert_eq!(
        parse_type("A * B +-> POW(C)").unwrap(),
        Type::PFun(
            Box::new(Type::Prod(Box::new(Type::Sort("A".into())), Box::new(Type::Sort("B".into())))),
            Box::new(Type::Pow(Box::new(Type::Sort("C".into()))))
        )
    );
    assert_eq!(
        parse_type("A --> B <-> C").unwrap(),
        Type::TFun(
            Box::new(Type::Sort("A".into())),
            Box::new(Type::Rel(Box::new(Type::Sort("B".into())), Box::new(Type::Sort("C".into()))))
        )
    );
}

#[test]
fn astd_arrows_and_scope() {
    let a = parse_astd(
        "AUT A { INIT 1; STATE 1; STATE 2 = AUT B { INIT x; STATE x; }; \
         TRANS 1 -> 2/x : e(t, k); TRANS 2/x -> 1 : f; }",
        &["t"],
    )
    .unwrap();
    let AstdNode::Automaton(a) = a else { panic!() };
    assert_eq!(
        a.transitions[0].arrow,
        Arrow::ToSub {
            from: "1".into(),
            to: "2".into(),
            to_sub: "x".into()
        }
    );
    assert_eq!(
        a.transitions[0].event.args,
        vec![ArgPattern::Var("t".into()), ArgPattern::Atom("k".into())]
    );
    assert!(matches!(a.transitions[1].arrow, Arrow::FromSub { .. }));
    assert!(parse_astd("AUT A { STATE 1; }", &[]).is_err());
    assert!(parse_astd("AUT A { INIT 1; TRANS 1/a -> 2/b : e; }", &[]).is_err());
}

#[test]
fn deep_nesting_is_rejected_not_crashing() {
    let src = format!("{}x = y{}", "(".repeat(5000), ")".repeat(5000));
    let err = parse_pred(&src).unwrap_err();
    assert!(err.message.contains("too deep"));
    let src = format!("{}ELEM{}", "KLEENE (".repeat(3000), ")".repeat(3000));
    assert!(parse_astd(&src, &[]).is_err());
}
