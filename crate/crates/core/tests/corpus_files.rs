use std::path::PathBuf;

use astd_core::data::Type;
use astd_core::spec_lang::{check_static, load, load_file, parse, render};
use proptest::prelude::*;

const FILES: [&str; 9] = [
    "trains_L1.astd",
    "trains_L2.astd",
    "trains_L3.astd",
    "trains_L4.astd",
    "mutants/L1_no_jump_check.astd",
    "mutants/L2_mal_past_front.astd",
    "mutants/L4_no_commTB.astd",
    "mutants/L3_t2_blocked.astd",
    "mutants/L1_early_movement.astd",
];

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

#[test]
fn all_corpus_files_load() {
    for f in FILES {
        if let Err(e) = load_file(&corpus(f)) {
            panic!("{f}: {e}");
        }
    }
}

#[test]
fn l1_declarations() {
    let doc = load(&read("trains_L1.astd")).unwrap();
    let sorts: Vec<&str> = doc.sorts.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(sorts, ["TRAIN", "TRACK"]);
    assert_eq!(
        doc.variable("position").unwrap().ty,
        Type::PFun(Box::new(Type::Sort("TRAIN".into())), Box::new(Type::Sort("TRACK".into())))
    );
    let events: Vec<&str> = doc.events.iter().map(|e| e.def.label.as_str()).collect();
    assert_eq!(events, ["start", "movement", "stop"]);
    assert!(doc.astd.is_some());
}

#[test]
fn l2_has_no_static_diagnostics() {
    assert_eq!(check_static(&parse(&read("trains_L2.astd")).unwrap()), vec![]);
}

#[test]
fn corpus_round_trips_through_render() {
    for f in FILES {
        let doc = parse(&read(f)).unwrap();
        let text = render(&doc);
        let again = parse(&text).unwrap_or_else(|e| panic!("{f}: {e:?}\n{text}"));
        assert_eq!(doc, again, "{f}");
    }
}

#[test]
fn undeclared_event_is_reported_at_transition() {
    let src = read("trains_L1.astd").replace("movement(t)", "jump(t)");
    let line = src.lines().position(|l| l.contains("jump(t)")).unwrap() + 1;
    let diags = check_static(&parse(&src).unwrap());
    let d = diags
        .iter()
        .find(|d| d.message.contains("undeclared event `jump`"))
        .unwrap_or_else(|| panic!("{diags:?}"));
    assert_eq!(d.span.line as usize, line);
}

fn mutate(src: &str, cut: usize, insert: &str) -> String {
    let mut cut = cut.min(src.len());
    while !src.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}{}{}", &src[..cut], insert, &src[cut..])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // Arbitrary bytes never crash the front end.
    #[test]
    fn parse_is_total_on_noise(s in "\\PC{0,200}") {
        let _ = parse(&s).map(|d| check_static(&d));
    }

    #[test]
    fn parse_is_total_on_corrupted_corpus(
        file in 0usize..4,
        cut in 0usize..6000,
        insert in prop::sample::select(vec!["(", ")", "{", ";", "END", "AUT", ":", "||", "'", "KLEENE", "", "\u{e9}"]),
        drop in 0usize..40,
    ) {
        let src = read(FILES[file]);
        let mut m = mutate(&src, cut, insert);
        let mut at = cut.min(m.len());
        while !m.is_char_boundary(at) { at -= 1; }
        let mut end = (at + drop).min(m.len());
        while !m.is_char_boundary(end) { end += 1; }
        m.replace_range(at..end, "");
        if let Ok(doc) = parse(&m) {
            let _ = check_static(&doc);
            let again = parse(&render(&doc)).unwrap();
            prop_assert_eq!(doc, again);
        }
    }
}
