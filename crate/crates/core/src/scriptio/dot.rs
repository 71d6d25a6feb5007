use std::collections::BTreeSet;

use crate::model::System;

const ENV: &str = "ENV";

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: one box per component, the environment as an
/// ellipse, one edge per channel from its producer to each reader.
pub fn render_dot(system: &System) -> String {
    let mut edges: BTreeSet<(String, String, String)> = BTreeSet::new();
    for c in &system.inputs {
        for r in system.readers(c) {
            edges.insert((ENV.into(), r.name().into(), c.to_string()));
        }
    }
    for comp in &system.components {
        for c in comp.outputs() {
            for r in system.readers(c) {
                edges.insert((comp.name().into(), r.name().into(), c.to_string()));
            }
            if system.outputs.contains(c) {
                edges.insert((comp.name().into(), ENV.into(), c.to_string()));
            }
        }
    }
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n  node [shape=box];\n", quote(&system.name));
    out.push_str(&format!("  {} [shape=ellipse];\n", quote(ENV)));
    for c in system.sorted_components() {
        out.push_str(&format!("  {};\n", quote(c.name())));
    }
    for (from, to, label) in edges {
        out.push_str(&format!("  {} -> {} [label={}];\n", quote(&from), quote(&to), quote(&label)));
    }
    out.push_str("}\n");
    out
}
