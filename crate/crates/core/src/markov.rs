//! Markov ordering graphs: declustering, marginalization (latent
//! projection), the Markov ordering graph and its restriction to the
//! complete and overcomplete parts, and acyclification.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::bipartite::BipartiteGraph;
use crate::cluster_graph::DirectedClusterGraph;
use crate::error::{Error, Result};
use crate::matching::coarse_decomposition;
use crate::mixed_graph::DirectedMixedGraph;
use crate::ordering::order_cd;

/// Expand a directed cluster graph back into a plain directed graph:
/// `v -> w` iff `v -> cl(w)` was a cluster edge.
pub fn decluster(clustered: &DirectedClusterGraph) -> DirectedMixedGraph {
    let vertices: BTreeSet<String> = clustered.vertices().cloned().collect();
    let mut directed = BTreeSet::new();
    for (source, target_rep) in clustered.edges() {
        for member in clustered.cluster_of(target_rep).expect("target exists") {
            directed.insert((source.clone(), member.clone()));
        }
    }
    DirectedMixedGraph::new(vertices, directed, []).expect("cluster vertices are declared")
}

/// Dropped vertices that reach `target` by a directed path whose interior
/// lies entirely in `drop`.
fn dropped_ancestors_through_dropped(
    graph: &DirectedMixedGraph,
    drop: &BTreeSet<String>,
    target: &str,
) -> BTreeSet<String> {
    let mut reached = BTreeSet::new();
    let mut queue: VecDeque<String> = graph
        .parents(target)
        .into_iter()
        .filter(|p| drop.contains(p) && p != target)
        .collect();
    while let Some(d) = queue.pop_front() {
        if !reached.insert(d.clone()) {
            continue;
        }
        for p in graph.parents(&d) {
            if drop.contains(&p) && !reached.contains(&p) {
                queue.push_back(p);
            }
        }
    }
    reached
}

/// Latent projection: drop a vertex set while synthesizing the directed and
/// bidirected edges that preserve separation statements among the retained
/// vertices.
pub fn marginalize(graph: &DirectedMixedGraph, drop: &BTreeSet<String>) -> Result<DirectedMixedGraph> {
    for d in drop {
        if !graph.contains(d) {
            return Err(Error::UnknownVertex(d.clone()));
        }
    }
    let retained: BTreeSet<String> = graph
        .vertices()
        .iter()
        .filter(|v| !drop.contains(*v))
        .cloned()
        .collect();

    // Directed: x -> y iff a directed path runs from x to y through dropped
    // vertices only. Self-loops survive only as direct edges.
    let mut directed = BTreeSet::new();
    for x in &retained {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut queue: VecDeque<String> = graph.children(x).into_iter().collect();
        while let Some(c) = queue.pop_front() {
            if !seen.insert(c.clone()) {
                continue;
            }
            if retained.contains(&c) {
                if &c != x {
                    directed.insert((x.clone(), c.clone()));
                }
            } else {
                for grand in graph.children(&c) {
                    if !seen.contains(&grand) {
                        queue.push_back(grand);
                    }
                }
            }
        }
        if graph.has_directed_edge(x, x) {
            directed.insert((x.clone(), x.clone()));
        }
    }

    // Bidirected: kept directly, through a dropped common cause, or through
    // a bidirected edge bridging two dropped causal chains.
    let confounder_sources: BTreeMap<&String, BTreeSet<String>> = retained
        .iter()
        .map(|y| (y, dropped_ancestors_through_dropped(graph, drop, y)))
        .collect();
    let mut bidirected: BTreeSet<(String, String)> = graph
        .bidirected()
        .iter()
        .filter(|(a, b)| retained.contains(a) && retained.contains(b))
        .cloned()
        .collect();
    let retained_vec: Vec<&String> = retained.iter().collect();
    for (i, x) in retained_vec.iter().enumerate() {
        for y in retained_vec.iter().skip(i + 1) {
            let sources_x = &confounder_sources[*x];
            let sources_y = &confounder_sources[*y];
            let common_cause = !sources_x.is_disjoint(sources_y);
            let bridged = graph.bidirected().iter().any(|(a, b)| {
                let a_feeds_x = a == *x || sources_x.contains(a);
                let b_feeds_y = b == *y || sources_y.contains(b);
                let a_feeds_y = a == *y || sources_y.contains(a);
                let b_feeds_x = b == *x || sources_x.contains(b);
                let through_drop =
                    drop.contains(a) || drop.contains(b);
                through_drop && ((a_feeds_x && b_feeds_y) || (a_feeds_y && b_feeds_x))
            });
            if common_cause || bridged {
                bidirected.insert(((*x).clone(), (*y).clone()));
            }
        }
    }
    DirectedMixedGraph::new(retained, directed, bidirected)
}

/// The Markov ordering graph: decluster the causal ordering graph and
/// marginalize out the constraint vertices. Always acyclic.
pub fn markov_ordering_graph(graph: &BipartiteGraph) -> DirectedMixedGraph {
    let ordering = order_cd(graph);
    let declustered = decluster(&ordering);
    marginalize(&declustered, graph.constraints()).expect("constraint vertices are present")
}

/// The Markov ordering graph restricted to the variables of the complete
/// and overcomplete parts. Exogenous vertices stay (possibly isolated);
/// only the incomplete part's endogenous variables are dropped, since the
/// Markov property does not cover them.
pub fn markov_ordering_restricted(graph: &BipartiteGraph) -> DirectedMixedGraph {
    let mo = markov_ordering_graph(graph);
    let cd = coarse_decomposition(&graph.endogenous_subgraph());
    let keep: BTreeSet<String> = mo
        .vertices()
        .iter()
        .filter(|v| !cd.incomplete.contains(*v))
        .cloned()
        .collect();
    mo.induced_subgraph(&keep).expect("own vertices are known")
}

/// Acyclification: every vertex inherits the external parents of its
/// strongly connected component, intra-component directed edges vanish, and
/// component co-membership (as well as any bidirected edge between
/// components) becomes a bidirected edge. Sigma-separation in the input
/// coincides with d-separation in the result.
pub fn acyclify(graph: &DirectedMixedGraph) -> DirectedMixedGraph {
    let membership = graph.scc_membership();
    let mut directed = BTreeSet::new();
    for (i, j) in graph.directed() {
        let component = &membership[j];
        if component.contains(i) {
            continue;
        }
        for k in component {
            directed.insert((i.clone(), k.clone()));
        }
    }
    let mut bidirected: BTreeSet<(String, String)> = BTreeSet::new();
    for component in graph.strongly_connected_components() {
        let members: Vec<&String> = component.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in members.iter().skip(i + 1) {
                bidirected.insert(((*a).clone(), (*b).clone()));
            }
        }
    }
    for (a, b) in graph.bidirected() {
        for a2 in &membership[a] {
            for b2 in &membership[b] {
                if a2 != b2 {
                    let pair = if a2 < b2 {
                        (a2.clone(), b2.clone())
                    } else {
                        (b2.clone(), a2.clone())
                    };
                    bidirected.insert(pair);
                }
            }
        }
    }
    DirectedMixedGraph::new(graph.vertices().clone(), directed, bidirected)
        .expect("acyclification keeps the vertex set")
}
