use std::collections::{BTreeSet, HashMap};

use super::*;
use crate::data::{Atom, CmpOp, DataState, Env, EvalCtx, EvalError, Expr, Pred, Schema, Universe};
use crate::diag::Span;

struct Ctx {
    universe: Universe,
    schema: Schema,
    constants: HashMap<String, crate::data::Value>,
}

impl Ctx {
    fn trains(names: &[&str]) -> Self {
        let mut universe = Universe::new();
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        universe.add_sort("TRAIN", &names).unwrap();
        Ctx {
            universe,
            schema: Schema::default(),
            constants: HashMap::new(),
        }
    }
}

impl GuardContext for Ctx {
    fn holds(&self, pred: &Pred, env: &Env) -> Result<bool, EvalError> {
        let ctx = EvalCtx::new(&self.universe, &self.schema, &self.constants);
        ctx.eval_pred(pred, &DataState(vec![]), None, &mut env.clone())
    }
    fn domain(&self, sort: &str) -> Option<Vec<Atom>> {
        self.universe.atoms_of(sort)
    }
    fn atom(&self, name: &str) -> Option<Atom> {
        self.universe.atom(name)
    }
}

fn trans(from: &str, to: &str, label: &str, final_flag: bool) -> Transition {
    Transition {
        arrow: Arrow::Loc {
            from: from.into(),
            to: to.into(),
        },
        event: EventPattern {
            label: label.into(),
            args: vec![ArgPattern::Var("t".into())],
        },
        guard: Pred::True,
        final_flag,
        span: Span::default(),
    }
}

fn aut(
    name: &str,
    states: Vec<(&str, AstdNode)>,
    init: &str,
    finals: &[&str],
    transitions: Vec<Transition>,
) -> AstdNode {
    AstdNode::Automaton(Automaton {
        name: name.into(),
        states: states.into_iter().map(|(n, s)| (n.to_string(), s)).collect(),
        init: init.into(),
        finals: finals.iter().map(|s| s.to_string()).collect(),
        transitions,
        span: Span::default(),
    })
}

/// One train: idle, or running a closure of single movements.
fn train_body() -> AstdNode {
    let s2 = aut(
        "S2",
        vec![("2.1", AstdNode::Elem), ("2.2", AstdNode::Elem)],
        "2.1",
        &["2.2"],
        vec![trans("2.1", "2.2", "movement", false)],
    );
    aut(
        "S1",
        vec![("1.1", AstdNode::Elem), ("1.2", AstdNode::Kleene(Box::new(s2)))],
        "1.1",
        &["1.1"],
        vec![
            trans("1.1", "1.2", "start", false),
            trans("1.2", "1.1", "stop", true),
        ],
    )
}

fn interleave(body: AstdNode) -> AstdNode {
    AstdNode::Quant(Quant {
        kind: QuantKind::Interleave,
        var: "t".into(),
        domain: "TRAIN".into(),
        sync_labels: BTreeSet::new(),
        sync_pred: Pred::True,
        body: Box::new(body),
        span: Span::default(),
    })
}

fn ev(label: &str, args: &[&str]) -> Event {
    Event::new(label, args)
}

fn one(
    node: &AstdNode,
    s: &ControlState,
    e: &Event,
    env: &Env,
    ctx: &Ctx,
) -> BTreeSet<ControlState> {
    control_step(node, s, e, env, ctx, StepOptions::default()).unwrap()
}

fn env_t(ctx: &Ctx, t: &str) -> Env {
    Env::new().with("t", crate::data::Value::Atom(ctx.atom(t).unwrap()))
}

#[test]
fn initial_state_is_final() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = interleave(train_body());
    let s0 = init(&root, &ctx).unwrap();
    assert!(is_final(&root, &s0).unwrap());
    match &s0 {
        ControlState::Quant(f) => assert_eq!(f.len(), 2),
        _ => panic!("expected quantified state"),
    }
}

#[test]
fn stop_requires_final_closure() {
    let ctx = Ctx::trains(&["t1"]);
    let body = train_body();
    let env = env_t(&ctx, "t1");
    let s0 = init(&body, &ctx).unwrap();
    let s1: Vec<_> = one(&body, &s0, &ev("start", &["t1"]), &env, &ctx).into_iter().collect();
    assert_eq!(s1.len(), 1);
    // Closure not yet started: stop allowed.
    assert_eq!(one(&body, &s1[0], &ev("stop", &["t1"]), &env, &ctx).len(), 1);
    let s2: Vec<_> = one(&body, &s1[0], &ev("movement", &["t1"]), &env, &ctx)
        .into_iter()
        .collect();
    assert_eq!(s2.len(), 1);
    assert!(is_final(&body, &s0).unwrap());
    // Closure finished a movement: stop allowed, and movement restarts it.
    assert_eq!(one(&body, &s2[0], &ev("stop", &["t1"]), &env, &ctx), [s0.clone()].into());
    let again = one(&body, &s2[0], &ev("movement", &["t1"]), &env, &ctx);
    assert_eq!(again, [s2[0].clone()].into());
}

#[test]
fn stop_refused_inside_unfinished_closure() {
    let ctx = Ctx::trains(&["t1"]);
    let s2 = aut(
        "S2",
        vec![
            ("2.1", AstdNode::Elem),
            ("2.2", AstdNode::Elem),
            ("2.3", AstdNode::Elem),
        ],
        "2.1",
        &["2.3"],
        vec![
            trans("2.1", "2.2", "movement", false),
            trans("2.2", "2.3", "compute_l", false),
        ],
    );
    let body = aut(
        "S1",
        vec![("1.1", AstdNode::Elem), ("1.2", AstdNode::Kleene(Box::new(s2)))],
        "1.1",
        &["1.1"],
        vec![
            trans("1.1", "1.2", "start", false),
            trans("1.2", "1.1", "stop", true),
        ],
    );
    let env = env_t(&ctx, "t1");
    let mut s = init(&body, &ctx).unwrap();
    for l in ["start", "movement"] {
        s = one(&body, &s, &ev(l, &["t1"]), &env, &ctx).into_iter().next().unwrap();
    }
    assert!(one(&body, &s, &ev("stop", &["t1"]), &env, &ctx).is_empty());
    assert!(one(&body, &s, &ev("movement", &["t1"]), &env, &ctx).is_empty());
    s = one(&body, &s, &ev("compute_l", &["t1"]), &env, &ctx).into_iter().next().unwrap();
    assert_eq!(one(&body, &s, &ev("stop", &["t1"]), &env, &ctx).len(), 1);
}

#[test]
fn interleaving_moves_one_instance() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = interleave(train_body());
    let s0 = init(&root, &ctx).unwrap();
    let s1 = one(&root, &s0, &ev("start", &["t2"]), &Env::new(), &ctx);
    assert_eq!(s1.len(), 1);
    let s1 = s1.into_iter().next().unwrap();
    match (&s0, &s1) {
        (ControlState::Quant(a), ControlState::Quant(b)) => {
            assert_eq!(a[0], b[0]);
            assert_ne!(a[1], b[1]);
        }
        _ => panic!(),
    }
    assert!(!is_final(&root, &s1).unwrap());
    assert!(one(&root, &s0, &ev("start", &["t3"]), &Env::new(), &ctx).is_empty());
    assert!(one(&root, &s0, &ev("movement", &["t1"]), &Env::new(), &ctx).is_empty());
}

fn sync_root(kind: QuantKind, sync_pred: Pred) -> AstdNode {
    let body = aut(
        "S",
        vec![("a", AstdNode::Elem), ("b", AstdNode::Elem)],
        "a",
        &["a"],
        vec![Transition {
            arrow: Arrow::Loc {
                from: "a".into(),
                to: "b".into(),
            },
            event: EventPattern {
                label: "tick".into(),
                args: vec![],
            },
            guard: Pred::True,
            final_flag: false,
            span: Span::default(),
        }],
    );
    AstdNode::Quant(Quant {
        kind,
        var: "t".into(),
        domain: "TRAIN".into(),
        sync_labels: ["tick".to_string()].into(),
        sync_pred,
        body: Box::new(body),
        span: Span::default(),
    })
}

#[test]
fn synchronisation_moves_all_instances() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = sync_root(QuantKind::Sync, Pred::True);
    let s0 = init(&root, &ctx).unwrap();
    let s1 = one(&root, &s0, &ev("tick", &[]), &Env::new(), &ctx);
    assert_eq!(s1.len(), 1);
    let s1 = s1.into_iter().next().unwrap();
    assert_eq!(
        s1,
        ControlState::Quant(vec![ControlState::aut(1, ControlState::Elem); 2])
    );
    // Every instance is required, none can tick again.
    assert!(one(&root, &s1, &ev("tick", &[]), &Env::new(), &ctx).is_empty());
}

fn is_t1() -> Pred {
    Pred::Cmp(CmpOp::Eq, Expr::Ident("t".into()), Expr::Ident("t1".into()))
}

#[test]
fn weak_sync_optional_instances() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = sync_root(QuantKind::WeakSync, is_t1());
    let s0 = init(&root, &ctx).unwrap();
    let lax = one(&root, &s0, &ev("tick", &[]), &Env::new(), &ctx);
    // t1 must move; t2 may or may not.
    assert_eq!(lax.len(), 2);
    let strict = control_step(
        &root,
        &s0,
        &ev("tick", &[]),
        &Env::new(),
        &ctx,
        StepOptions {
            weak_sync_strict: true,
        },
    )
    .unwrap();
    assert_eq!(
        strict,
        [ControlState::Quant(vec![
            ControlState::aut(1, ControlState::Elem),
            ControlState::aut(0, ControlState::Elem),
        ])]
        .into()
    );
}

#[test]
fn weak_sync_blocked_by_required_instance() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = sync_root(QuantKind::WeakSync, is_t1());
    let s = ControlState::Quant(vec![
        ControlState::aut(1, ControlState::Elem),
        ControlState::aut(0, ControlState::Elem),
    ]);
    assert!(one(&root, &s, &ev("tick", &[]), &Env::new(), &ctx).is_empty());
}

#[test]
fn weak_sync_with_nobody_required_can_idle() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let root = sync_root(QuantKind::WeakSync, Pred::False);
    let s = ControlState::Quant(vec![ControlState::aut(1, ControlState::Elem); 2]);
    // No instance can move and none is required: the event is a no-op.
    assert_eq!(one(&root, &s, &ev("tick", &[]), &Env::new(), &ctx), [s.clone()].into());
}

#[test]
fn sub_arrows_enter_and_leave_substates() {
    let ctx = Ctx::trains(&["t1"]);
    let inner = aut(
        "B",
        vec![("x", AstdNode::Elem), ("y", AstdNode::Elem)],
        "x",
        &["y"],
        vec![trans("x", "y", "go", false)],
    );
    let mut outer = aut(
        "A",
        vec![("p", AstdNode::Elem), ("q", inner)],
        "p",
        &["p"],
        vec![],
    );
    if let AstdNode::Automaton(a) = &mut outer {
        let mut t = trans("p", "q", "jump", false);
        t.arrow = Arrow::ToSub {
            from: "p".into(),
            to: "q".into(),
            to_sub: "y".into(),
        };
        a.transitions.push(t);
        let mut t = trans("q", "p", "back", false);
        t.arrow = Arrow::FromSub {
            from: "q".into(),
            from_sub: "x".into(),
            to: "p".into(),
        };
        a.transitions.push(t);
    }
    let env = env_t(&ctx, "t1");
    let s0 = init(&outer, &ctx).unwrap();
    let s1 = one(&outer, &s0, &ev("jump", &["t1"]), &env, &ctx);
    assert_eq!(s1, [ControlState::aut(1, ControlState::aut(1, ControlState::Elem))].into());
    let s1 = s1.into_iter().next().unwrap();
    // `back` only leaves from substate x.
    assert!(one(&outer, &s1, &ev("back", &["t1"]), &env, &ctx).is_empty());
    let sx = ControlState::aut(1, ControlState::aut(0, ControlState::Elem));
    assert_eq!(one(&outer, &sx, &ev("back", &["t1"]), &env, &ctx), [s0].into());
}

#[test]
fn guards_and_literal_arguments() {
    let ctx = Ctx::trains(&["t1", "t2"]);
    let mut body = train_body();
    if let AstdNode::Automaton(a) = &mut body {
        a.transitions[0].guard = Pred::not(is_t1());
        a.transitions[1].event.args = vec![ArgPattern::Atom("t2".into())];
    }
    let s0 = init(&body, &ctx).unwrap();
    let e1 = env_t(&ctx, "t1");
    let e2 = env_t(&ctx, "t2");
    assert!(one(&body, &s0, &ev("start", &["t1"]), &e1, &ctx).is_empty());
    let s1 = one(&body, &s0, &ev("start", &["t2"]), &e2, &ctx).into_iter().next().unwrap();
    assert!(one(&body, &s1, &ev("stop", &["t1"]), &e2, &ctx).is_empty());
    assert_eq!(one(&body, &s1, &ev("stop", &["t2"]), &e2, &ctx).len(), 1);
}

#[test]
fn unbound_pattern_variable_is_an_error() {
    let ctx = Ctx::trains(&["t1"]);
    let body = train_body();
    let s0 = init(&body, &ctx).unwrap();
    let r = control_step(&body, &s0, &ev("start", &["t1"]), &Env::new(), &ctx, StepOptions::default());
    assert!(matches!(r, Err(ControlError::UnboundPattern(_))));
}

#[test]
fn shape_mismatch_is_an_error() {
    let ctx = Ctx::trains(&["t1"]);
    let body = train_body();
    let r = control_step(&body, &ControlState::Elem, &ev("start", &["t1"]), &Env::new(), &ctx, StepOptions::default());
    assert!(matches!(r, Err(ControlError::Shape(_))));
}
