mod common;

use std::collections::BTreeSet;
use std::sync::LazyLock;

use astd_core::engine::*;
use astd_core::spec_lang::load;
use common::{ev, system, trace};
use proptest::prelude::*;

#[test]
fn l1_start_offers_every_track() {
    let sys = system("trains_L1");
    let s0 = sys.initial().unwrap();
    let r = sys.combined_step(&s0, &ev("start(t1)")).unwrap();
    assert_eq!(r.refusal, None);
    assert_eq!(r.successors.len(), 4);
    for s in &r.successors {
        assert!(sys.describe_control(&s.control).starts_with("{t1: S1@1.2"));
        assert!(sys.describe_control(&s.control).contains("t2: S1@1.1}"));
    }
    let positions: BTreeSet<String> = r
        .successors
        .iter()
        .map(|s| sys.describe_data(&s.data)[0].1.clone())
        .collect();
    assert_eq!(
        positions,
        ["{t1 |-> p1}", "{t1 |-> p2}", "{t1 |-> p3}", "{t1 |-> p4}"]
            .map(String::from)
            .into()
    );
}

#[test]
fn movement_before_start_is_refused_by_control() {
    let sys = system("trains_L1");
    let r = sys.combined_step(&sys.initial().unwrap(), &ev("movement(t1)")).unwrap();
    assert!(r.successors.is_empty());
    assert_eq!(r.refusal, Some(Refusal::Control));
}

#[test]
fn l2_needs_a_limit_before_moving() {
    let sys = system("trains_L2");
    let s0 = sys.initial().unwrap();
    let started = sys.combined_step(&s0, &ev("start(t1)")).unwrap().successors;
    for s in &started {
        let r = sys.combined_step(s, &ev("movement(t1)")).unwrap();
        assert_eq!(r.refusal, Some(Refusal::Control));
        assert!(sys.combined_step(s, &ev("compute_l(t1)")).unwrap().refusal.is_none());
    }
}

#[test]
fn bad_event_arguments_are_errors() {
    let sys = system("trains_L1");
    let s0 = sys.initial().unwrap();
    assert!(sys.combined_step(&s0, &ev("start(p1)")).is_err());
    assert!(sys.combined_step(&s0, &ev("start")).is_err());
    assert!(sys.combined_step(&s0, &ev("jump(t1)")).is_err());
}

#[test]
fn alphabet_is_labels_times_arguments() {
    let sys = system("trains_L1");
    let names: Vec<String> = sys.alphabet().iter().map(|e| e.to_string()).collect();
    assert_eq!(
        names,
        ["start(t1)", "start(t2)", "movement(t1)", "movement(t2)", "stop(t1)", "stop(t2)"]
    );
    let l3 = system("trains_L3");
    assert!(l3.alphabet().iter().any(|e| e.to_string() == "compute"));
}

#[test]
fn max_states_one_truncates() {
    let sys = system("trains_L1");
    let lts = explore(
        &sys,
        Bounds {
            max_states: 1,
            ..Bounds::default()
        },
    )
    .unwrap();
    assert_eq!(lts.states.len(), 1);
    assert!(lts.truncated);
    assert!(lts.edges.is_empty());
}

#[test]
fn depth_bound_truncates() {
    let sys = system("trains_L1");
    let lts = explore(
        &sys,
        Bounds {
            max_depth: 1,
            ..Bounds::default()
        },
    )
    .unwrap();
    assert!(lts.truncated);
    assert_eq!(lts.states.len(), 1 + 8);
}

#[test]
fn full_l1_and_l2_have_no_violations() {
    for name in ["trains_L1", "trains_L2"] {
        let sys = system(name);
        let lts = explore(&sys, Bounds::default()).unwrap();
        assert!(!lts.truncated);
        assert_eq!(check_invariants(&sys, &lts).unwrap(), vec![]);
        assert_eq!(check_theorems(&sys, &lts).unwrap(), vec![]);
        assert_eq!(check_calling_consistency(&sys, &lts), vec![]);
    }
}

#[test]
fn no_jump_mutant_breaks_order() {
    let sys = system("mutants/L1_no_jump_check");
    let lts = explore(&sys, Bounds::default()).unwrap();
    let v = check_theorems(&sys, &lts).unwrap();
    assert!(!v.is_empty());
    let w = &v[0];
    assert!(matches!(&w.kind, ViolationKind::Theorem { name } if name == "order_movement"));
    // The witness replays, and its last step swaps the trains.
    let t: Vec<_> = w.trace.iter().map(|e| ev(e)).collect();
    assert!(trace_accept(&sys, &t).unwrap());
    assert_eq!(lts.trace_to(w.state).len() + 1, t.len());
}

#[test]
fn early_movement_breaks_calling_consistency() {
    let sys = system("mutants/L1_early_movement");
    let lts = explore(&sys, Bounds::default()).unwrap();
    let v = check_calling_consistency(&sys, &lts);
    assert!(!v.is_empty());
    assert_eq!(v[0].kind, ViolationKind::Calling { event: "movement(t1)".into() });
    assert_eq!(v[0].trace, ["movement(t1)"]);
}

#[test]
fn trivial_cases() {
    let sys = system("trains_L1");
    let lts = explore(&sys, Bounds::default()).unwrap();
    let empty = Lts {
        states: vec![],
        edges: vec![],
        refusals: vec![],
        parent: vec![],
        ..lts.clone()
    };
    assert_eq!(check_invariants(&sys, &empty).unwrap(), vec![]);
    assert_eq!(check_calling_consistency(&sys, &empty), vec![]);

    let src = common::source("trains_L1").replace(
        "  order_start ON start :",
        "  trivially ON movement : btrue;\n  order_start ON start :",
    );
    let sys2 = System::new(load(&src).unwrap()).unwrap();
    let lts2 = explore(&sys2, Bounds::default()).unwrap();
    assert_eq!(check_theorems(&sys2, &lts2).unwrap(), vec![]);
}

#[test]
fn no_events_no_calling_violations() {
    let src = "SPEC quiet\nSORTS S = {a};\nVARIABLES x : POW(S) := {};\nASTD AUT A { INIT 1; STATE 1; }\nEND\n";
    let sys = System::new(load(src).unwrap()).unwrap();
    let lts = explore(&sys, Bounds::default()).unwrap();
    assert_eq!(lts.states.len(), 1);
    assert_eq!(check_calling_consistency(&sys, &lts), vec![]);
}

#[test]
fn trace_acceptance_examples() {
    let sys = system("trains_L1");
    assert!(trace_accept(&sys, &[]).unwrap());
    assert!(trace_accept(&sys, &trace("start(t1) movement(t1) movement(t1) stop(t1)")).unwrap());
    assert!(!trace_accept(&sys, &trace("movement(t1)")).unwrap());
    assert!(!trace_accept(&sys, &trace("start(t1) start(t1)")).unwrap());
    assert!(!trace_accept(&sys, &trace("jump(t1)")).unwrap());
}

#[test]
fn exploration_is_deterministic() {
    for name in ["trains_L2", "trains_L4"] {
        let sys = system(name);
        let a = explore(&sys, Bounds::default()).unwrap();
        let b = explore(
            &sys,
            Bounds {
                parallel: false,
                ..Bounds::default()
            },
        )
        .unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.refusals, b.refusals);
    }
}

#[test]
fn raising_bounds_never_loses_states() {
    let sys = system("trains_L2");
    let mut prev: Option<Lts> = None;
    for n in [1, 5, 50, 200, 471, 1000] {
        let lts = explore(
            &sys,
            Bounds {
                max_states: n,
                ..Bounds::default()
            },
        )
        .unwrap();
        if let Some(p) = &prev {
            let have: BTreeSet<_> = lts.states.iter().collect();
            assert!(p.states.iter().all(|s| have.contains(s)));
            let edges: BTreeSet<_> = lts
                .edges
                .iter()
                .map(|e| (&lts.states[e.from], e.event, &lts.states[e.to]))
                .collect();
            assert!(p
                .edges
                .iter()
                .all(|e| edges.contains(&(&p.states[e.from], e.event, &p.states[e.to]))));
        }
        prev = Some(lts);
    }
    assert!(!prev.unwrap().truncated);
}

#[test]
fn exports() {
    let sys = system("trains_L1");
    let lts = explore(&sys, Bounds::default()).unwrap();
    let j = lts_to_json(&sys, &lts, &[]);
    assert_eq!(j["states"].as_array().unwrap().len(), lts.states.len());
    assert_eq!(j["transitions"].as_array().unwrap().len(), lts.edges.len());
    assert_eq!(j["initial"], 0);
    assert_eq!(j["truncated"], false);
    assert_eq!(j["states"][0]["data"]["position"], "{}");
    let dot = lts_to_dot(&sys, &lts);
    assert!(dot.starts_with("digraph lts {"));
    assert_eq!(dot.matches(" -> ").count(), lts.edges.len());
}

fn random_trace(sys: &System, picks: &[usize]) -> Vec<astd_core::control::Event> {
    picks
        .iter()
        .map(|i| sys.alphabet()[i % sys.alphabet().len()].clone())
        .collect()
}

fn lts_accepts(lts: &Lts, t: &[astd_core::control::Event]) -> bool {
    let out = lts.outgoing();
    let mut cur = BTreeSet::from([lts.initial]);
    for e in t {
        let Some(ei) = lts.alphabet.iter().position(|a| a == e) else {
            return false;
        };
        cur = cur
            .iter()
            .flat_map(|&s| out[s].iter().filter(|x| x.event == ei).map(|x| x.to))
            .collect();
        if cur.is_empty() {
            return false;
        }
    }
    true
}

static L2: LazyLock<(System, Lts)> = LazyLock::new(|| {
    let sys = system("trains_L2");
    let lts = explore(&sys, Bounds::default()).unwrap();
    (sys, lts)
});

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_accept_matches_lts_paths(picks in prop::collection::vec(0usize..64, 0..8)) {
        let (sys, lts) = &*L2;
        let t = random_trace(sys, &picks);
        prop_assert_eq!(trace_accept(sys, &t).unwrap(), lts_accepts(lts, &t));
    }
}

#[test]
fn reachable_counts_match_the_hand_written_models() {
    for (name, (states, edges)) in [
        ("trains_L1", common::oracle::l1_counts()),
        ("trains_L2", common::oracle::l2_counts()),
    ] {
        let lts = explore(&system(name), Bounds::default()).unwrap();
        assert_eq!((lts.states.len(), lts.edges.len()), (states, edges), "{name}");
    }
    // Frozen from the hand-written models.
    assert_eq!(common::oracle::l1_counts(), (65, 368));
    assert_eq!(common::oracle::l2_counts(), (471, 2040));
}
