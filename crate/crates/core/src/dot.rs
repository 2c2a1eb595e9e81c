//! Graphviz DOT rendering. Clusters come out as subgraph boxes and
//! exogenous vertices get dashed borders, mirroring the usual drawings of
//! these graphs.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::bipartite::BipartiteGraph;
use crate::cluster_graph::DirectedClusterGraph;
use crate::mixed_graph::DirectedMixedGraph;

fn quoted(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node_attributes(id: &str, exogenous: &BTreeSet<String>, constraint: bool) -> String {
    let mut attrs = Vec::new();
    if constraint {
        attrs.push("shape=box".to_string());
    }
    if exogenous.contains(id) {
        attrs.push("style=dashed".to_string());
    }
    if attrs.is_empty() {
        String::new()
    } else {
        format!(" [{}]", attrs.join(", "))
    }
}

pub fn bipartite_to_dot(graph: &BipartiteGraph) -> String {
    let mut out = String::from("graph bipartite {\n");
    for v in graph.variables() {
        let _ = writeln!(out, "  {}{};", quoted(v), node_attributes(v, graph.exogenous(), false));
    }
    for f in graph.constraints() {
        let _ = writeln!(out, "  {}{};", quoted(f), node_attributes(f, graph.exogenous(), true));
    }
    for (v, f) in graph.edges() {
        let _ = writeln!(out, "  {} -- {};", quoted(v), quoted(f));
    }
    out.push_str("}\n");
    out
}

pub fn cluster_graph_to_dot(
    graph: &DirectedClusterGraph,
    exogenous: &BTreeSet<String>,
) -> String {
    let mut out = String::from("digraph causal_ordering {\n  compound=true;\n");
    let mut anchors = Vec::new();
    for (index, cluster) in graph.clusters().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{index} {{");
        for member in cluster {
            let _ = writeln!(
                out,
                "    {}{};",
                quoted(member),
                node_attributes(member, exogenous, false)
            );
        }
        out.push_str("  }\n");
        anchors.push((
            cluster.iter().next().expect("cluster nonempty").clone(),
            index,
        ));
    }
    for (source, target_rep) in graph.edges() {
        let (anchor, index) = anchors
            .iter()
            .find(|(rep, _)| rep == target_rep)
            .expect("edge target is a cluster representative");
        let _ = writeln!(
            out,
            "  {} -> {} [lhead=cluster_{index}];",
            quoted(source),
            quoted(anchor)
        );
    }
    out.push_str("}\n");
    out
}

pub fn mixed_graph_to_dot(graph: &DirectedMixedGraph, exogenous: &BTreeSet<String>) -> String {
    let mut out = String::from("digraph markov_ordering {\n");
    for v in graph.vertices() {
        let _ = writeln!(out, "  {}{};", quoted(v), node_attributes(v, exogenous, false));
    }
    for (a, b) in graph.directed() {
        let _ = writeln!(out, "  {} -> {};", quoted(a), quoted(b));
    }
    for (a, b) in graph.bidirected() {
        let _ = writeln!(out, "  {} -> {} [dir=both];", quoted(a), quoted(b));
    }
    out.push_str("}\n");
    out
}
