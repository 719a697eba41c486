use std::fmt::Write;

use serde_json::{json, Value as Json};

use super::{Lts, System, Violation};

/// JSON document with `states`, `initial`, `transitions`, `truncated` and
/// `violations`.
pub fn lts_to_json(sys: &System, lts: &Lts, violations: &[Violation]) -> Json {
    let states: Vec<Json> = lts
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let data: serde_json::Map<String, Json> = sys
                .describe_data(&s.data)
                .into_iter()
                .map(|(n, v)| (n, Json::String(v)))
                .collect();
            json!({ "id": i, "control": sys.describe_control(&s.control), "data": data })
        })
        .collect();
    let transitions: Vec<Json> = lts
        .edges
        .iter()
        .map(|e| json!({ "from": e.from, "event": lts.alphabet[e.event].to_string(), "to": e.to }))
        .collect();
    json!({
        "spec": sys.doc.name,
        "initial": lts.initial,
        "truncated": lts.truncated,
        "states": states,
        "transitions": transitions,
        "violations": violations,
    })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn lts_to_dot(sys: &System, lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=box, fontname=monospace];\n");
    for (i, s) in lts.states.iter().enumerate() {
        let style = if i == lts.initial { ", penwidth=2" } else { "" };
        let _ = writeln!(out, "  s{i} [label={}{style}];", quote(&sys.describe(s)));
    }
    for e in &lts.edges {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}];",
            e.from,
            e.to,
            quote(&lts.alphabet[e.event].to_string())
        );
    }
    out.push_str("}\n");
    out
}
