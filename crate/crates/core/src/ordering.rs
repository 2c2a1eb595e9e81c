//! Causal ordering: three routes from a bipartite graph to the same
//! directed cluster graph.
//!
//! * [`order_msc`] repeatedly extracts minimal self-contained sets.
//! * [`order_pm`] orients edges along a perfect matching, clusters strongly
//!   connected components, and merges matched partners.
//! * [`order_cd`] first coarse-decomposes the graph, so it accepts inputs
//!   whose endogenous part is not self-contained.
//!
//! The first two require a self-contained endogenous subgraph and agree with
//! each other; the third agrees with them whenever they apply.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bipartite::BipartiteGraph;
use crate::cluster_graph::DirectedClusterGraph;
use crate::error::{Error, Result};
use crate::matching::{
    coarse_decomposition, is_self_contained, minimal_self_contained_sets,
    perfect_matching, Matching,
};
use crate::mixed_graph::DirectedMixedGraph;

/// Causal ordering by repeated extraction of minimal self-contained sets.
/// Deterministic; the output provably does not depend on the extraction
/// order, which [`order_msc_seeded`] exercises.
pub fn order_msc(graph: &BipartiteGraph) -> Result<DirectedClusterGraph> {
    order_msc_select(graph, |_| 0)
}

/// Same algorithm with a seeded random choice among the eligible minimal
/// self-contained sets at every step. Exists to exercise uniqueness of the
/// output; any seed yields the same graph.
pub fn order_msc_seeded(graph: &BipartiteGraph, seed: u64) -> Result<DirectedClusterGraph> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    order_msc_select(graph, move |sets| {
        let mut indices: Vec<usize> = (0..sets.len()).collect();
        indices.shuffle(&mut rng);
        indices[0]
    })
}

fn order_msc_select(
    graph: &BipartiteGraph,
    mut choose: impl FnMut(&[BTreeSet<String>]) -> usize,
) -> Result<DirectedClusterGraph> {
    let endogenous = graph.endogenous_subgraph();
    if !is_self_contained(&endogenous) {
        return Err(Error::NotSelfContained);
    }
    let mut clusters: Vec<BTreeSet<String>> = graph
        .exogenous()
        .iter()
        .map(|w| [w.clone()].into())
        .collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut current = endogenous;
    while !current.is_null() {
        let candidates = minimal_self_contained_sets(&current)?;
        let chosen = &candidates[choose(&candidates)];
        let adjacent_here = current.adjacency_of_constraints(chosen);
        let cluster: BTreeSet<String> = chosen.union(&adjacent_here).cloned().collect();
        let anchor = cluster.iter().next().expect("cluster nonempty").clone();
        // Incoming edges come from vertices adjacent in the full graph but
        // not in the remaining subgraph: exogenous variables and variables
        // already placed in earlier clusters.
        let adjacent_full = graph.adjacency_of_constraints(chosen);
        for v in adjacent_full.difference(&adjacent_here) {
            edges.push((v.clone(), anchor.clone()));
        }
        clusters.push(cluster.clone());
        let keep: BTreeSet<String> = current
            .variables()
            .iter()
            .chain(current.constraints())
            .filter(|x| !cluster.contains(*x))
            .cloned()
            .collect();
        current = current.induced_subgraph(&keep)?;
    }
    DirectedClusterGraph::new(clusters, edges)
}

/// Orient the edges of `graph` along a matching that is perfect for the
/// endogenous subgraph: `f -> v` for matched pairs, `v -> f` otherwise.
pub fn orient(graph: &BipartiteGraph, matching: &Matching) -> Result<DirectedMixedGraph> {
    let endogenous = graph.endogenous();
    let covered = endogenous
        .iter()
        .chain(graph.constraints())
        .all(|x| matching.is_matched(x));
    if !covered || matching.len() != graph.constraints().len() {
        return Err(Error::NotPerfectForEndogenous);
    }
    let vertices: BTreeSet<String> = graph
        .variables()
        .iter()
        .chain(graph.constraints())
        .cloned()
        .collect();
    let directed = graph
        .edges()
        .iter()
        .map(|(v, f)| {
            if matching.contains(v, f) {
                (f.clone(), v.clone())
            } else {
                (v.clone(), f.clone())
            }
        })
        .collect();
    DirectedMixedGraph::new(vertices, directed, [])
}

/// Partition a directed graph into strongly connected components and keep
/// edges from vertices to foreign components. Bidirected edges are ignored.
pub fn clusterize(graph: &DirectedMixedGraph) -> DirectedClusterGraph {
    let components = graph.strongly_connected_components();
    let membership = graph.scc_membership();
    let edges: Vec<(String, String)> = graph
        .directed()
        .iter()
        .filter(|(a, b)| !membership[b].contains(a))
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    DirectedClusterGraph::new(components, edges)
        .expect("strongly connected components condense to a DAG")
}

/// Merge each cluster with its matched partners: `S` becomes `S ∪ M(S)`,
/// and an edge `x -> S` survives as `x -> S ∪ M(S)` unless `x ∈ M(S)`.
pub fn merge(clustered: &DirectedClusterGraph, matching: &Matching) -> DirectedClusterGraph {
    let clusters: BTreeSet<BTreeSet<String>> = clustered
        .clusters()
        .map(|s| {
            s.union(&matching.partners_of_set(s))
                .cloned()
                .collect::<BTreeSet<String>>()
        })
        .collect();
    let mut edges = Vec::new();
    for (source, target_rep) in clustered.edges() {
        let target = clustered
            .cluster_of(target_rep)
            .expect("edge target exists");
        let partners = matching.partners_of_set(target);
        if !partners.contains(source) {
            edges.push((source.clone(), target_rep.clone()));
        }
    }
    DirectedClusterGraph::new(clusters, edges).expect("merged clusters form an acyclic partition")
}

/// Causal ordering via a perfect matching of the endogenous subgraph.
pub fn order_pm(graph: &BipartiteGraph) -> Result<DirectedClusterGraph> {
    let matching = perfect_matching(&graph.endogenous_subgraph())
        .map_err(|_| Error::NotSelfContained)?;
    order_pm_with(graph, &matching)
}

/// Causal ordering with a caller-supplied perfect matching; the output does
/// not depend on which one.
pub fn order_pm_with(
    graph: &BipartiteGraph,
    matching: &Matching,
) -> Result<DirectedClusterGraph> {
    let oriented = orient(graph, matching)?;
    Ok(merge(&clusterize(&oriented), matching))
}

/// Causal ordering via the coarse decomposition; accepts any bipartite
/// graph. The complete part is ordered with [`order_pm`], the incomplete
/// and overcomplete parts contribute their connected components as
/// clusters, and cross edges follow the decomposition's one-way structure.
pub fn order_cd(graph: &BipartiteGraph) -> DirectedClusterGraph {
    let endogenous = graph.endogenous_subgraph();
    let cd = coarse_decomposition(&endogenous);

    let complete = endogenous
        .induced_subgraph(&cd.complete)
        .expect("decomposition vertices are known");
    let incomplete = endogenous
        .induced_subgraph(&cd.incomplete)
        .expect("decomposition vertices are known");
    let overcomplete = endogenous
        .induced_subgraph(&cd.overcomplete)
        .expect("decomposition vertices are known");

    let ordered_complete = order_pm(&complete).expect("the complete part is self-contained");

    let mut clusters: Vec<BTreeSet<String>> = ordered_complete.clusters().cloned().collect();
    clusters.extend(incomplete.connected_components());
    clusters.extend(overcomplete.connected_components());
    clusters.extend(graph.exogenous().iter().map(|w| [w.clone()].into()));

    let mut edges: Vec<(String, String)> = ordered_complete
        .edges()
        .iter()
        .map(|(s, t)| (s.clone(), t.clone()))
        .collect();
    let variables_oc: BTreeSet<&String> = cd
        .overcomplete
        .iter()
        .filter(|x| graph.variables().contains(*x))
        .collect();
    let variables_c: BTreeSet<&String> = cd
        .complete
        .iter()
        .filter(|x| graph.variables().contains(*x))
        .collect();
    let constraints_i: BTreeSet<&String> = cd
        .incomplete
        .iter()
        .filter(|x| graph.constraints().contains(*x))
        .collect();
    let constraints_c: BTreeSet<&String> = cd
        .complete
        .iter()
        .filter(|x| graph.constraints().contains(*x))
        .collect();
    for (v, f) in graph.edges() {
        let into_incomplete =
            (variables_oc.contains(v) || variables_c.contains(v)) && constraints_i.contains(f);
        let into_complete = variables_oc.contains(v) && constraints_c.contains(f);
        if into_incomplete || into_complete {
            edges.push((v.clone(), f.clone()));
        }
    }
    for w in graph.exogenous() {
        for f in graph.adjacency_of_variable(w) {
            edges.push((w.clone(), f.clone()));
        }
    }
    DirectedClusterGraph::new(clusters, edges)
        .expect("coarse decomposition admits no cluster cycles")
}
