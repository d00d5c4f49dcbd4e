//! Graphviz rendering of instances, optionally highlighting the arcs a
//! solution rides.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use unsplit_core::{ArcId, Instance, UnsplittableSolution, VertexId};

use crate::formats::number;

pub fn render_dot(inst: &Instance, solution: Option<&UnsplittableSolution>) -> String {
    let used: BTreeSet<ArcId> = solution
        .map(|sol| sol.paths.iter().flat_map(|p| p.arcs.iter().copied()).collect())
        .unwrap_or_default();
    let sources: BTreeSet<VertexId> = inst.sources().into_iter().collect();
    let sinks: BTreeSet<VertexId> = inst.sinks().into_iter().collect();
    let mut out = String::from("digraph instance {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    for &v in inst.vertex_ids() {
        let b = inst.balance(v);
        if sources.contains(&v) {
            writeln!(out, "  n{v} [shape=box, label=\"{v}\\n+{}\"];", number(b)).unwrap();
        } else if sinks.contains(&v) {
            writeln!(
                out,
                "  n{v} [shape=doublecircle, label=\"{v}\\n{}\"];",
                number(b)
            )
            .unwrap();
        } else {
            writeln!(out, "  n{v} [label=\"{v}\"];").unwrap();
        }
    }
    for arc in inst.arcs() {
        let style = if used.contains(&arc.id) {
            ", penwidth=2.5, color=\"#1f77b4\""
        } else {
            ""
        };
        writeln!(
            out,
            "  n{} -> n{} [label=\"{}: {}\"{style}];",
            arc.tail,
            arc.head,
            arc.id,
            number(&arc.capacity)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use unsplit_core::instances::gen_nonintegral;
    use unsplit_core::solve_upper;

    #[test]
    fn rendering_marks_terminals_and_used_arcs() {
        let (inst, flow) = gen_nonintegral();
        let plain = render_dot(&inst, None);
        assert!(plain.starts_with("digraph instance {"));
        assert!(plain.contains("shape=box"));
        assert!(plain.contains("shape=doublecircle"));
        assert!(!plain.contains("penwidth"));

        let run = solve_upper(&inst, &flow).unwrap();
        let marked = render_dot(&inst, Some(&run.solution));
        assert!(marked.contains("penwidth"));
        assert_eq!(marked, render_dot(&inst, Some(&run.solution)));
    }
}
