use std::collections::{BTreeSet, HashMap};

use super::*;

fn universe() -> Universe {
    let mut u = Universe::new();
    u.add_sort("A", &["a1".into(), "a2".into()]).unwrap();
    u.add_sort("B", &["b1".into(), "b2".into(), "b3".into()]).unwrap();
    u
}

fn sort(s: &str) -> Type {
    Type::Sort(s.into())
}

#[test]
fn cardinalities_match_enumeration() {
    let u = universe();
    let types = [
        Type::Bool,
        sort("B"),
        Type::Prod(Box::new(sort("A")), Box::new(sort("B"))),
        Type::Pow(Box::new(sort("B"))),
        Type::PFun(Box::new(sort("A")), Box::new(sort("B"))),
        Type::TFun(Box::new(sort("A")), Box::new(sort("B"))),
        Type::Rel(Box::new(sort("A")), Box::new(sort("A"))),
    ];
    let expected = [2, 3, 6, 8, 16, 9, 16];
    for (t, n) in types.iter().zip(expected) {
        let all = t.enumerate(&u).unwrap();
        assert_eq!(all.len() as u128, t.cardinality(&u).unwrap(), "{t:?}");
        assert_eq!(all.len(), n, "{t:?}");
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), n);
        assert!(all.iter().all(|v| t.contains(v, &u)));
    }
}

#[test]
fn oversized_candidate_spaces_are_refused() {
    let mut u = Universe::new();
    let names: Vec<String> = (0..20).map(|i| format!("x{i}")).collect();
    u.add_sort("X", &names).unwrap();
    let t = Type::Pow(Box::new(sort("X")));
    assert!(matches!(t.enumerate(&u), Err(EvalError::TooLarge(_))));
}

#[test]
fn duplicate_atoms_are_rejected() {
    let mut u = universe();
    assert!(u.add_sort("C", &["a1".into()]).is_err());
    assert!(u.add_sort("A", &["z".into()]).is_err());
}

fn ctx_eval(src_vars: Vec<(String, Type)>, e: &Expr, pre: &DataState) -> Result<Value, EvalError> {
    let u = universe();
    let schema = Schema::new(src_vars);
    let consts = HashMap::new();
    EvalCtx::new(&u, &schema, &consts).eval_expr(e, pre, None, &Env::new())
}

#[test]
fn set_operators() {
    let u = universe();
    let at = |n: &str| Value::Atom(u.atom(n).unwrap());
    let a = Expr::SetLit(vec![Expr::ident("b1"), Expr::ident("b2")]);
    let b = Expr::SetLit(vec![Expr::ident("b2"), Expr::ident("b3")]);
    let none = DataState(vec![]);
    let set = |xs: &[&str]| Value::Set(xs.iter().map(|x| at(x)).collect());
    let cases = [
        (SetOp::Union, set(&["b1", "b2", "b3"])),
        (SetOp::Inter, set(&["b2"])),
        (SetOp::Diff, set(&["b1"])),
    ];
    for (op, want) in cases {
        let got = ctx_eval(vec![], &Expr::bin(op, a.clone(), b.clone()), &none).unwrap();
        assert_eq!(got, want, "{op:?}");
    }
    let f = Expr::SetLit(vec![
        Expr::pair(Expr::ident("a1"), Expr::ident("b1")),
        Expr::pair(Expr::ident("a2"), Expr::ident("b2")),
    ]);
    let g = Expr::SetLit(vec![Expr::pair(Expr::ident("a1"), Expr::ident("b3"))]);
    let over = ctx_eval(vec![], &Expr::bin(SetOp::Override, f.clone(), g), &none).unwrap();
    assert_eq!(
        over,
        Value::Set(
            [
                Value::pair(at("a1"), at("b3")),
                Value::pair(at("a2"), at("b2"))
            ]
            .into()
        )
    );
    let sub = Expr::bin(SetOp::DomSub, Expr::SetLit(vec![Expr::ident("a1")]), f.clone());
    assert_eq!(
        ctx_eval(vec![], &sub, &none).unwrap(),
        Value::Set([Value::pair(at("a2"), at("b2"))].into())
    );
    let ran = ctx_eval(vec![], &Expr::Ran(Box::new(f.clone())), &none).unwrap();
    assert_eq!(ran, set(&["b1", "b2"]));
    let app = ctx_eval(vec![], &Expr::app(f, Expr::ident("a2")), &none).unwrap();
    assert_eq!(app, at("b2"));
}

#[test]
fn application_of_a_relation_that_is_not_a_function() {
    let r = Expr::SetLit(vec![
        Expr::pair(Expr::ident("a1"), Expr::ident("b1")),
        Expr::pair(Expr::ident("a1"), Expr::ident("b2")),
    ]);
    let e = Expr::app(r, Expr::ident("a1"));
    assert!(matches!(
        ctx_eval(vec![], &e, &DataState(vec![])),
        Err(EvalError::NotFunctional(_))
    ));
}

#[test]
fn unbound_and_primed_identifiers() {
    let none = DataState(vec![]);
    assert!(matches!(
        ctx_eval(vec![], &Expr::ident("nope"), &none),
        Err(EvalError::Unbound(_))
    ));
    let vars = vec![("x".to_string(), Type::Pow(Box::new(sort("A"))))];
    let pre = DataState(vec![Value::empty_set()]);
    assert!(matches!(
        ctx_eval(vars, &Expr::Primed("x".into()), &pre),
        Err(EvalError::PrimedOutsideTwoState(_))
    ));
}

#[test]
fn typing_is_enforced_on_assignment() {
    let u = universe();
    let schema = Schema::new(vec![("f".to_string(), Type::PFun(Box::new(sort("A")), Box::new(sort("B"))))]);
    let consts = HashMap::new();
    let ctx = EvalCtx::new(&u, &schema, &consts);
    let pre = DataState(vec![Value::empty_set()]);
    let bad = Subst::Assign(
        "f".into(),
        Expr::SetLit(vec![
            Expr::pair(Expr::ident("a1"), Expr::ident("b1")),
            Expr::pair(Expr::ident("a1"), Expr::ident("b2")),
        ]),
    );
    assert!(matches!(
        ctx.apply_subst(&bad, &pre, &mut Env::new()),
        Err(EvalError::Typing { .. })
    ));
    let such = Subst::Such(
        "f".into(),
        Pred::cmp(CmpOp::Eq, Expr::Dom(Box::new(Expr::Primed("f".into()))), Expr::ident("A")),
    );
    // Total functions A -> B: 3^2 of them.
    assert_eq!(ctx.apply_subst(&such, &pre, &mut Env::new()).unwrap().len(), 9);
}
