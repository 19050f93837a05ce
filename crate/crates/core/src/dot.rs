//! Graphviz renderings of balanced graphs and clock lattices.

use std::fmt::Write;

use crate::clock::ClockDag;
use crate::tait::BalancedGraph;

/// Undirected DOT of a balanced graph, black vertices filled.
pub fn gamma_dot(b: &BalancedGraph) -> String {
    let g = b.graph();
    let nb = b.num_black();
    let mut out = String::from("graph gamma {\n  node [shape=circle, width=0.3, label=\"\"];\n");
    for v in 0..nb {
        writeln!(out, "  b{v} [style=filled, fillcolor=black, tooltip=\"crossing {}\"];", b.black_labels()[v]).unwrap();
    }
    for w in 0..g.num_white() {
        writeln!(out, "  w{w} [fillcolor=white, tooltip=\"face {}\"];", b.white_labels()[w]).unwrap();
    }
    for e in 0..g.num_edges() {
        let [u, w] = g.ends(e);
        writeln!(out, "  b{u} -- w{} [id=e{e}];", w - nb).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Directed DOT of the clock lattice with states ranked by distance from the
/// clocked state.
pub fn lattice_dot(cd: &ClockDag) -> String {
    let dist = cd.base.bfs(cd.zero_hat);
    let levels = dist.iter().copied().filter(|&d| d != usize::MAX).max().map_or(0, |m| m + 1);
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for level in 0..levels {
        let members: Vec<String> = (0..dist.len()).filter(|&v| dist[v] == level).map(|v| format!("s{v}")).collect();
        writeln!(out, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
    }
    for v in 0..cd.base.num_nodes() {
        let tag = if v == cd.zero_hat {
            " (0)"
        } else if v == cd.one_hat {
            " (1)"
        } else {
            ""
        };
        writeln!(out, "  s{v} [label=\"{v}{tag}\"];").unwrap();
    }
    for e in 0..cd.forward.len() {
        writeln!(out, "  s{} -> s{} [label=\"f{}\"];", cd.tail(e), cd.head(e), cd.base.edges[e].face).unwrap();
    }
    out.push_str("}\n");
    out
}
