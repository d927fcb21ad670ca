//! Graphviz DOT rendering. Primary nodes are ellipses labeled `Y1..Yp`,
//! secondary nodes are boxes labeled `X1..Xq`; labels are 1-based to match
//! the JSON boundary. Output ordering is deterministic.

use std::fmt::Write as _;

use crate::gmm::EdgeEstimate;
use crate::graph::{AncestralGraph, CausalGraph};

fn header(out: &mut String, name: &str) {
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
}

fn primary_nodes(out: &mut String, p: usize) {
    for j in 0..p {
        let _ = writeln!(out, "  Y{} [shape=ellipse];", j + 1);
    }
}

fn secondary_nodes(out: &mut String, q: usize) {
    for l in 0..q {
        let _ = writeln!(out, "  X{} [shape=box];", l + 1);
    }
}

/// Renders a causal graph: direct edges solid, intervention edges dashed.
pub fn causal_graph_dot(g: &CausalGraph) -> String {
    let mut out = String::new();
    header(&mut out, "causal");
    primary_nodes(&mut out, g.p());
    secondary_nodes(&mut out, g.q());
    for &(k, j) in g.edges() {
        let _ = writeln!(out, "  Y{} -> Y{};", k + 1, j + 1);
    }
    for &(l, j) in g.interventions() {
        let _ = writeln!(out, "  X{} -> Y{} [style=dashed];", l + 1, j + 1);
    }
    out.push_str("}\n");
    out
}

/// Renders an ancestral relation graph: ancestral edges solid, instrument
/// reach edges dashed, candidate IV edges dotted and labeled.
pub fn ancestral_graph_dot(arg: &AncestralGraph) -> String {
    let mut out = String::new();
    header(&mut out, "ancestral");
    primary_nodes(&mut out, arg.p());
    secondary_nodes(&mut out, arg.q());
    for &(k, j) in arg.ancestral_edges() {
        let _ = writeln!(out, "  Y{} -> Y{};", k + 1, j + 1);
    }
    for &(l, j) in arg.reach_edges() {
        let _ = writeln!(out, "  X{} -> Y{} [style=dashed];", l + 1, j + 1);
    }
    for (k, ivs) in arg.all_candidate_ivs().iter().enumerate() {
        for &l in ivs {
            let _ = writeln!(
                out,
                "  X{} -> Y{} [style=dotted, label=\"ca\"];",
                l + 1,
                k + 1
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Renders the selected edges of an estimate, labeled with effect sizes.
/// Unselected edges are omitted.
pub fn selected_edges_dot(p: usize, edges: &[EdgeEstimate]) -> String {
    let mut out = String::new();
    header(&mut out, "selected");
    primary_nodes(&mut out, p);
    for e in edges.iter().filter(|e| e.selected) {
        let _ = writeln!(
            out,
            "  Y{} -> Y{} [label=\"{:.3}\"];",
            e.k + 1,
            e.j + 1,
            e.beta
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_graph() -> CausalGraph {
        CausalGraph::new(
            3,
            4,
            [(0, 1), (1, 2)],
            [(0, 0), (1, 1), (2, 2), (3, 1), (3, 2)],
        )
        .unwrap()
    }

    #[test]
    fn causal_dot_shape() {
        let dot = causal_graph_dot(&example_graph());
        assert!(dot.starts_with("digraph causal {"));
        assert!(dot.ends_with("}\n"));
        assert!(dot.contains("  Y1 [shape=ellipse];"));
        assert!(dot.contains("  X4 [shape=box];"));
        assert!(dot.contains("  Y1 -> Y2;"));
        assert!(dot.contains("  X4 -> Y3 [style=dashed];"));
    }

    #[test]
    fn ancestral_dot_shape() {
        let arg = example_graph().to_arg().unwrap();
        let dot = ancestral_graph_dot(&arg);
        assert!(dot.contains("  Y1 -> Y3;"));
        assert!(dot.contains("  X4 -> Y2 [style=dotted, label=\"ca\"];"));
    }

    #[test]
    fn selected_dot_filters() {
        let edges = vec![
            EdgeEstimate {
                k: 0,
                j: 1,
                beta: 1.25,
                std_err: 0.1,
                p_value: 0.0,
                selected: true,
            },
            EdgeEstimate {
                k: 1,
                j: 2,
                beta: 3.0,
                std_err: 1.0,
                p_value: 0.9,
                selected: false,
            },
        ];
        let dot = selected_edges_dot(3, &edges);
        assert!(dot.contains("  Y1 -> Y2 [label=\"1.250\"];"));
        assert!(!dot.contains("Y2 -> Y3"));
    }

    #[test]
    fn deterministic_output() {
        let g = example_graph();
        assert_eq!(causal_graph_dot(&g), causal_graph_dot(&g));
    }
}
