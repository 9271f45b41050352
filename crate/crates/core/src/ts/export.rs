//! DOT and JSON renderings of a transition system.

use std::fmt::Write;

use serde::Serialize;

use super::{BuildLimits, Semantics, TransitionSystem};

#[derive(Serialize)]
struct JsonState {
    id: usize,
    abox: Vec<String>,
    map: Vec<JsonCall>,
}

#[derive(Serialize)]
struct JsonCall {
    call: String,
    value: String,
}

#[derive(Serialize)]
struct JsonEdge {
    src: usize,
    dst: usize,
    label: String,
}

#[derive(Serialize)]
struct JsonTs {
    semantics: Semantics,
    states: Vec<JsonState>,
    edges: Vec<JsonEdge>,
    initial: usize,
    active_domain: Vec<String>,
    limits: BuildLimits,
}

pub fn to_json(ts: &TransitionSystem) -> String {
    let doc = JsonTs {
        semantics: ts.semantics(),
        states: ts
            .states()
            .iter()
            .enumerate()
            .map(|(id, s)| JsonState {
                id,
                abox: s.abox.iter().map(|a| a.to_string()).collect(),
                map: s
                    .map
                    .iter()
                    .map(|(c, v)| JsonCall {
                        call: c.to_string(),
                        value: v.clone(),
                    })
                    .collect(),
            })
            .collect(),
        edges: ts
            .edges()
            .iter()
            .map(|e| JsonEdge {
                src: e.src,
                dst: e.dst,
                label: e.label.to_string(),
            })
            .collect(),
        initial: ts.initial(),
        active_domain: ts.active_domain().iter().map(|d| d.to_string()).collect(),
        limits: ts.limits(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(ts: &TransitionSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph ts {{");
    let _ = writeln!(out, "  node [shape=box];");
    for (id, s) in ts.states().iter().enumerate() {
        let mut label = s.abox.to_string();
        if !s.map.is_empty() {
            let m: Vec<String> = s.map.iter().map(|(c, v)| format!("{c}->{v}")).collect();
            label.push_str(&format!("\\n[{}]", m.join(", ")));
        }
        let peripheries = if id == ts.initial() { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{id} [label=\"{}\"{peripheries}];", escape(&label));
    }
    for e in ts.edges() {
        let style = if e.label.is_repair() { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"{style}];",
            e.src,
            e.dst,
            escape(&e.label.to_string())
        );
    }
    out.push_str("}\n");
    out
}
