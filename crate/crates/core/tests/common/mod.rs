#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use astd_core::control::Event;
use astd_core::engine::System;
use astd_core::spec_lang::{load, SpecDoc};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.astd"))
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn doc(name: &str) -> SpecDoc {
    load(&source(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn system(name: &str) -> System {
    System::new(doc(name)).unwrap()
}

pub fn ev(text: &str) -> Event {
    Event::parse(text).unwrap()
}

pub fn trace(text: &str) -> Vec<Event> {
    text.split_whitespace().map(ev).collect()
}
