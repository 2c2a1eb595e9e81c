//! d-separation and sigma-separation on directed mixed graphs.
//!
//! The efficient queries walk the graph with an arrowhead-state search; the
//! `*_bruteforce` variants enumerate every simple path and apply the
//! blocking clauses literally, serving as independent oracles.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::mixed_graph::DirectedMixedGraph;

/// Vertex cap for the path-enumeration oracles.
pub const BRUTE_FORCE_VERTEX_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Mark {
    Head,
    Tail,
}

/// Incident connections of `v`: (neighbor, mark at v, mark at neighbor).
/// Self-loops never lie on a path and are skipped.
fn incident(graph: &DirectedMixedGraph, v: &str) -> Vec<(String, Mark, Mark)> {
    let mut out = Vec::new();
    for (a, b) in graph.directed() {
        if a == b {
            continue;
        }
        if a == v {
            out.push((b.clone(), Mark::Tail, Mark::Head));
        }
        if b == v {
            out.push((a.clone(), Mark::Head, Mark::Tail));
        }
    }
    for (a, b) in graph.bidirected() {
        if a == v {
            out.push((b.clone(), Mark::Head, Mark::Head));
        }
        if b == v {
            out.push((a.clone(), Mark::Head, Mark::Head));
        }
    }
    out
}

fn check_query_sets(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
) -> Result<()> {
    for v in x.iter().chain(y).chain(z) {
        if !graph.contains(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    for v in x {
        if y.contains(v) || z.contains(v) {
            return Err(Error::OverlappingSets(v.clone()));
        }
    }
    for v in y {
        if z.contains(v) {
            return Err(Error::OverlappingSets(v.clone()));
        }
    }
    Ok(())
}

/// True iff every path between `x` and `y` is d-blocked by `z`.
pub fn d_separated(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
) -> Result<bool> {
    check_query_sets(graph, x, y, z)?;
    Ok(!reachable(graph, x, y, z, BlockingRule::D))
}

/// True iff every path between `x` and `y` is sigma-blocked by `z`. For
/// acyclic graphs this coincides with [`d_separated`].
pub fn sigma_separated(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
) -> Result<bool> {
    check_query_sets(graph, x, y, z)?;
    Ok(!reachable(graph, x, y, z, BlockingRule::Sigma))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BlockingRule {
    D,
    Sigma,
}

/// Arrowhead-state search for an unblocked walk from `x` to `y`. A state is
/// the current vertex, the mark of the arrival edge at that vertex, and the
/// vertex the arrival edge came from (needed for the strongly-connected
/// component condition of sigma-blocking).
fn reachable(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
    rule: BlockingRule,
) -> bool {
    if x.is_empty() || y.is_empty() {
        return false;
    }
    let ancestors_of_z = graph.ancestors_of_set(z);
    let scc = match rule {
        BlockingRule::Sigma => graph.scc_membership(),
        BlockingRule::D => BTreeMap::new(),
    };

    let mut seen: BTreeSet<(String, Mark, String)> = BTreeSet::new();
    let mut queue: VecDeque<(String, Mark, String)> = VecDeque::new();
    for start in x {
        for (u, _mark_at_start, mark_at_u) in incident(graph, start) {
            if y.contains(&u) {
                return true; // single-edge path, endpoints not conditioned
            }
            let state = (u.clone(), mark_at_u, start.clone());
            if seen.insert(state.clone()) {
                queue.push_back(state);
            }
        }
    }

    while let Some((v, mark_in, from)) = queue.pop_front() {
        for (u, mark_at_v, mark_at_u) in incident(graph, &v) {
            let collider = mark_in == Mark::Head && mark_at_v == Mark::Head;
            let passes = if collider {
                ancestors_of_z.contains(&v)
            } else {
                match rule {
                    BlockingRule::D => !z.contains(&v),
                    BlockingRule::Sigma => {
                        if !z.contains(&v) {
                            true
                        } else {
                            let component = &scc[&v];
                            let in_leaves = mark_in == Mark::Tail && !component.contains(&from);
                            let out_leaves = mark_at_v == Mark::Tail && !component.contains(&u);
                            !(in_leaves || out_leaves)
                        }
                    }
                }
            };
            if !passes {
                continue;
            }
            if y.contains(&u) {
                return true;
            }
            let state = (u.clone(), mark_at_u, v.clone());
            if seen.insert(state.clone()) {
                queue.push_back(state);
            }
        }
    }
    false
}

/// A simple path as vertices plus the marks of each step.
struct PathStep {
    to: String,
    mark_at_prev: Mark,
    mark_at_to: Mark,
}

fn enumerate_paths(
    graph: &DirectedMixedGraph,
    from: &str,
    to: &str,
) -> Vec<Vec<(String, Mark, Mark, String)>> {
    // Each path is a list of (left vertex, mark at left, mark at right,
    // right vertex) steps.
    let mut paths = Vec::new();
    let mut stack: Vec<PathStep> = Vec::new();
    let mut used: BTreeSet<String> = [from.to_string()].into();

    fn dfs(
        graph: &DirectedMixedGraph,
        current: &str,
        goal: &str,
        used: &mut BTreeSet<String>,
        stack: &mut Vec<PathStep>,
        paths: &mut Vec<Vec<(String, Mark, Mark, String)>>,
        origin: &str,
    ) {
        if current == goal {
            let mut path = Vec::new();
            let mut prev = origin.to_string();
            for step in stack.iter() {
                path.push((
                    prev.clone(),
                    step.mark_at_prev,
                    step.mark_at_to,
                    step.to.clone(),
                ));
                prev = step.to.clone();
            }
            paths.push(path);
            return;
        }
        for (u, mark_at_current, mark_at_u) in incident(graph, current) {
            if used.contains(&u) {
                continue;
            }
            used.insert(u.clone());
            stack.push(PathStep {
                to: u.clone(),
                mark_at_prev: mark_at_current,
                mark_at_to: mark_at_u,
            });
            dfs(graph, &u, goal, used, stack, paths, origin);
            stack.pop();
            used.remove(&u);
        }
    }

    dfs(graph, from, to, &mut used, &mut stack, &mut paths, from);
    paths
}

fn path_sigma_blocked(
    path: &[(String, Mark, Mark, String)],
    z: &BTreeSet<String>,
    ancestors_of_z: &BTreeSet<String>,
    scc: &BTreeMap<String, BTreeSet<String>>,
) -> bool {
    let first = &path[0].0;
    let last = &path[path.len() - 1].3;
    // Clause 1: an endpoint is conditioned.
    if z.contains(first) || z.contains(last) {
        return true;
    }
    // Clause 2: a collider outside the ancestors of Z.
    for i in 1..path.len() {
        let vertex = &path[i].0;
        let head_from_left = path[i - 1].2 == Mark::Head;
        let head_from_right = path[i].1 == Mark::Head;
        if head_from_left && head_from_right && !ancestors_of_z.contains(vertex) {
            return true;
        }
    }
    // Clause 3: a conditioned vertex whose on-path tail edge leaves its
    // strongly connected component.
    for i in 0..=path.len() {
        let vertex = if i == 0 { first } else { &path[i - 1].3 };
        if !z.contains(vertex) {
            continue;
        }
        if i < path.len() && path[i].1 == Mark::Tail && !scc[vertex].contains(&path[i].3) {
            return true;
        }
        if i > 0 && path[i - 1].2 == Mark::Tail && !scc[vertex].contains(&path[i - 1].0) {
            return true;
        }
    }
    false
}

fn path_d_blocked(
    path: &[(String, Mark, Mark, String)],
    z: &BTreeSet<String>,
    ancestors_of_z: &BTreeSet<String>,
    scc: &BTreeMap<String, BTreeSet<String>>,
) -> bool {
    if path_sigma_blocked(path, z, ancestors_of_z, scc) {
        return true;
    }
    // A conditioned vertex with an adjacent path edge lacking an arrowhead
    // at it.
    for i in 0..=path.len() {
        let vertex = if i == 0 { &path[0].0 } else { &path[i - 1].3 };
        if !z.contains(vertex) {
            continue;
        }
        if i < path.len() && path[i].1 == Mark::Tail {
            return true;
        }
        if i > 0 && path[i - 1].2 == Mark::Tail {
            return true;
        }
    }
    false
}

fn separated_bruteforce(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
    rule: BlockingRule,
) -> Result<bool> {
    if graph.vertices().len() > BRUTE_FORCE_VERTEX_CAP {
        return Err(Error::SizeLimit {
            what: "vertex set",
            actual: graph.vertices().len(),
            limit: BRUTE_FORCE_VERTEX_CAP,
        });
    }
    check_query_sets(graph, x, y, z)?;
    let ancestors_of_z = graph.ancestors_of_set(z);
    let scc = graph.scc_membership();
    for from in x {
        for to in y {
            for path in enumerate_paths(graph, from, to) {
                let blocked = match rule {
                    BlockingRule::D => path_d_blocked(&path, z, &ancestors_of_z, &scc),
                    BlockingRule::Sigma => path_sigma_blocked(&path, z, &ancestors_of_z, &scc),
                };
                if !blocked {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// d-separation by exhaustive simple-path enumeration; oracle for
/// [`d_separated`]. Capped at [`BRUTE_FORCE_VERTEX_CAP`] vertices.
pub fn d_separated_bruteforce(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
) -> Result<bool> {
    separated_bruteforce(graph, x, y, z, BlockingRule::D)
}

/// sigma-separation by exhaustive simple-path enumeration; oracle for
/// [`sigma_separated`].
pub fn sigma_separated_bruteforce(
    graph: &DirectedMixedGraph,
    x: &BTreeSet<String>,
    y: &BTreeSet<String>,
    z: &BTreeSet<String>,
) -> Result<bool> {
    separated_bruteforce(graph, x, y, z, BlockingRule::Sigma)
}
