use super::*;
use crate::data::{Subst, Value};
use crate::engine::{Bounds, System};
use crate::spec_lang::load;

fn doc(src: &str) -> SpecDoc {
    load(src).unwrap_or_else(|d| panic!("{d:?}"))
}

fn rejected(src: &str) -> Vec<String> {
    match translate_state_encoding(&doc(src)) {
        Err(TranslateError::Unsupported(d)) => d.into_iter().map(|d| d.message).collect(),
        other => panic!("expected a rejection, got {other:?}"),
    }
}

#[test]
fn state_names_become_identifiers() {
    assert_eq!(state_ident("2.1"), "S2_1");
    assert_eq!(state_ident("10.2"), "S10_2");
    assert_eq!(state_ident("idle"), "idle");
    assert_eq!(state_ident("a.b"), "a_b");
}

#[test]
fn zero_event_spec_has_variables_and_initialisation_only() {
    let d = doc("SPEC z\nSORTS A = {a1, a2};\nVARIABLES x : POW(A) := {a1};\nEND\n");
    let enc = translate_state_encoding(&d).unwrap();
    let text = enc.spec.render();
    assert!(text.contains("VARIABLES\n  x\n"), "{text}");
    assert!(text.contains("INITIALISATION\n  x := {a1}\n"), "{text}");
    assert!(!text.contains("OPERATIONS"), "{text}");
    let interp = Interpreter::new(&enc.spec).unwrap();
    let lts = interp.explore(10).unwrap();
    assert_eq!((lts.states.len(), lts.edges.len()), (1, 0));
}

const TOGGLE: &str = r#"
SPEC toggle
SORTS A = {a1, a2};
VARIABLES on : POW(A) := {};
EVENTS
  EVENT flip(x : A) WHERE x /: on THEN on := on \/ {x} END;
  EVENT flop(x : A) WHERE x : on THEN on := on - {x} END;
END
"#;

#[test]
fn without_an_astd_every_operation_just_calls_its_action() {
    let sys = System::new(doc(TOGGLE)).unwrap();
    let enc = translate_state_encoding(&sys.doc).unwrap();
    let main = enc.spec.main();
    assert!(main.variables.is_empty());
    let flip = main.operation("flip").unwrap();
    assert_eq!(
        flip.body,
        BSubst::Call {
            op: "flip_act".into(),
            args: vec![Expr::ident("x")]
        }
    );
    let f = check_fidelity(&sys, &enc, Bounds::default()).unwrap();
    assert!(f.isomorphic(), "{f:?}");
    assert_eq!(f.engine_states, 4);
}

#[test]
fn such_that_uses_the_before_value_notation() {
    let s = Subst::Such(
        "x".into(),
        Pred::cmp(
            CmpOp::Eq,
            Expr::Primed("x".into()),
            Expr::bin(crate::data::SetOp::Union, Expr::ident("x"), Expr::ident("y")),
        ),
    );
    assert_eq!(machine::data_subst(&s), "x : (x = x$0 \\/ y)");
}

const ARROWS: &str = r#"
SPEC arrows
SORTS P = {i1, i2};
VARIABLES n : POW(P) := {};
EVENTS
  EVENT a(x : P) THEN n := n \/ {x} END;
  EVENT b(x : P) WHERE x : n THEN n := n - {x} END;
  PURE c(x : P);
ASTD
  ||| t : P .
    AUT A {
      INIT 1;
      FINAL 1, 2;
      STATE 1;
      STATE 2 = AUT B {
        INIT 2.1;
        FINAL 2.2;
        STATE 2.1;
        STATE 2.2;
        TRANS 2.1 -> 2.2 : c(t);
      };
      TRANS 1 -> 2/2.2 : a(t);
      TRANS 2/2.1 -> 1 : b(t);
      TRANS 2 -> 1 : c(t) GUARD (t : n) FINAL;
    }
END
"#;

#[test]
fn substate_arrows_keep_the_encoding_faithful() {
    let sys = System::new(doc(ARROWS)).unwrap();
    let enc = translate_state_encoding(&sys.doc).unwrap();
    let f = check_fidelity(&sys, &enc, Bounds::default()).unwrap();
    assert!(f.isomorphic(), "{f:?}");
    let a = enc.spec.main().operation("a").unwrap();
    let text = machine::render_operation(a);
    assert!(text.contains("State_B(t) := S2_2"), "{text}");
}

#[test]
fn nested_quantification_is_rejected() {
    let src = r#"
SPEC nested
SORTS P = {i1};
EVENTS PURE e(x : P);
ASTD
  AUT A {
    INIT 1;
    STATE 1 = ||| u : P . AUT B { INIT 2; STATE 2; TRANS 2 -> 2 : e(u); };
  }
END
"#;
    let msgs = rejected(src);
    assert!(msgs.iter().any(|m| m.contains("quantification below the root")), "{msgs:?}");
}

#[test]
fn closure_of_a_closure_is_rejected() {
    let src = r#"
SPEC kk
EVENTS PURE e;
ASTD
  KLEENE (KLEENE (AUT A { INIT 1; FINAL 1; STATE 1; TRANS 1 -> 1 : e; }))
END
"#;
    let msgs = rejected(src);
    assert!(msgs.iter().any(|m| m.contains("directly under a closure")), "{msgs:?}");
}

const SYNCED: &str = r#"
SPEC synced
SORTS P = {i1, i2};
VARIABLES n : POW(P) := {};
EVENTS PURE g;
ASTD
  WSYNC t : P {g} WHEN (t /: n) .
    AUT A { INIT 1; STATE 1; STATE 2; TRANS 1 -> 2 : g; TRANS 2 -> 1 : g; }
END
"#;

#[test]
fn literal_weak_synchronisation_is_rejected() {
    let msgs = rejected(SYNCED);
    assert!(msgs.iter().any(|m| m.contains("strict reading")), "{msgs:?}");
    let strict = SYNCED.replace("SPEC synced", "SPEC synced\nOPTIONS weak-sync-strict;");
    let sys = System::new(doc(&strict)).unwrap();
    let enc = translate_state_encoding(&sys.doc).unwrap();
    let f = check_fidelity(&sys, &enc, Bounds::default()).unwrap();
    assert!(f.isomorphic(), "{f:?}");
}

#[test]
fn overlapping_synchronised_branches_are_rejected() {
    let src = r#"
SPEC overlap
SORTS P = {i1, i2};
EVENTS PURE g;
ASTD
  || t : P {g} .
    AUT A { INIT 1; STATE 1; STATE 2; TRANS 1 -> 1 : g; TRANS 1 -> 2 : g; }
END
"#;
    let msgs = rejected(src);
    assert!(msgs.iter().any(|m| m.contains("overlapping")), "{msgs:?}");
}

#[test]
fn generated_names_must_not_clash() {
    let src = r#"
SPEC clash
SORTS P = {i1};
VARIABLES State_A : POW(P) := {};
EVENTS PURE e(x : P);
ASTD
  ||| t : P . AUT A { INIT 1; STATE 1; TRANS 1 -> 1 : e(t); }
END
"#;
    let msgs = rejected(src);
    assert!(msgs.iter().any(|m| m.contains("`State_A` clashes")), "{msgs:?}");
}

#[test]
fn unbound_instance_uses_any() {
    let src = r#"
SPEC anyone
SORTS P = {i1, i2};
EVENTS PURE e;
ASTD
  ||| t : P . AUT A { INIT 1; STATE 1; STATE 2; TRANS 1 -> 2 : e; }
END
"#;
    let sys = System::new(doc(src)).unwrap();
    let enc = translate_state_encoding(&sys.doc).unwrap();
    let e = enc.spec.main().operation("e").unwrap();
    assert!(matches!(e.body, BSubst::Any { .. }), "{e:?}");
    let f = check_fidelity(&sys, &enc, Bounds::default()).unwrap();
    assert!(f.isomorphic(), "{f:?}");
    assert_eq!(f.engine_states, 4);
}

#[test]
fn parallel_writes_of_one_variable_conflict() {
    let spec = BSpec {
        machines: vec![Machine {
            name: "m".into(),
            sets: vec![("A".into(), vec!["a1".into(), "a2".into()])],
            variables: vec![("x".into(), crate::data::Type::Pow(Box::new(crate::data::Type::Sort("A".into()))))],
            init: vec![("x".into(), Expr::SetLit(vec![]))],
            operations: vec![Operation {
                name: "op".into(),
                params: vec![],
                pre: vec![],
                body: BSubst::Par(vec![
                    BSubst::Data(Subst::Assign("x".into(), Expr::SetLit(vec![Expr::ident("a1")]))),
                    BSubst::Data(Subst::Assign("x".into(), Expr::SetLit(vec![Expr::ident("a2")]))),
                ]),
            }],
            ..Default::default()
        }],
    };
    let interp = Interpreter::new(&spec).unwrap();
    let init = interp.initial().unwrap();
    assert_eq!(init.0, vec![Value::empty_set()]);
    let r = interp.step(&init, &crate::control::Event::new("op", &[]));
    assert!(matches!(r, Err(TranslateError::Eval(EvalError::WriteConflict(_)))), "{r:?}");
}

#[test]
fn enabled_sets_need_a_root_quantification() {
    let sys = System::new(doc(TOGGLE)).unwrap();
    assert!(matches!(
        translate_enabled_sets(&sys),
        Err(TranslateError::Unsupported(_))
    ));
}

#[test]
fn enabled_sets_of_a_dead_end_only_remove() {
    let src = r#"
SPEC dead
SORTS P = {i1, i2};
EVENTS PURE go(x : P); PURE halt(x : P);
ASTD
  ||| t : P . AUT A { INIT 1; STATE 1; STATE 2; STATE 3; TRANS 1 -> 2 : go(t); TRANS 2 -> 3 : halt(t); }
END
"#;
    let sys = System::new(doc(src)).unwrap();
    let (m, warnings) = translate_enabled_sets(&sys).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    assert_eq!(m.rules["halt"].add, Default::default());
    assert_eq!(m.rules["halt"].remove, ["halt".to_string()].into());
    let g = control_lts_of_enabled_sets(&m, &["i1".into(), "i2".into()]);
    let c = control_graph(&sys).unwrap();
    assert_eq!(crate::refinement::find_unmatched_trace(&g, &c), None);
    assert_eq!(crate::refinement::find_unmatched_trace(&c, &g), None);
}
