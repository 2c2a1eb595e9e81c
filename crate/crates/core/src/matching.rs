//! Matching machinery on bipartite graphs: self-containedness, minimal
//! self-contained sets, maximum and perfect matchings, alternating-path
//! reachability, and the coarse decomposition into incomplete, complete,
//! and overcomplete parts.
//!
//! `minimal_self_contained_sets` and `hall_check_bruteforce` are deliberately
//! brute-force and matching-free so they can serve as independent oracles for
//! the matching-based routines.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::bipartite::BipartiteGraph;
use crate::error::{Error, Result};

/// Cap on `|F|` for the exponential subset-enumeration routines. Exceeding
/// it is an explicit error, never silent truncation.
pub const BRUTE_FORCE_CAP: usize = 20;

/// A matching: edges without common endpoints, all from the host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: BTreeSet<(String, String)>,
}

impl Matching {
    pub fn new(graph: &BipartiteGraph, edges: BTreeSet<(String, String)>) -> Result<Self> {
        let mut used = BTreeSet::new();
        for (v, f) in &edges {
            if !graph.edges().contains(&(v.clone(), f.clone())) {
                return Err(Error::Validation(format!(
                    "matching edge ({v}, {f}) is not an edge of the graph"
                )));
            }
            if !used.insert(v.clone()) || !used.insert(f.clone()) {
                return Err(Error::Validation(format!(
                    "matching edges share an endpoint at ({v}, {f})"
                )));
            }
        }
        Ok(Self { edges })
    }

    pub fn from_pairs(graph: &BipartiteGraph, pairs: &[(&str, &str)]) -> Result<Self> {
        Self::new(
            graph,
            pairs
                .iter()
                .map(|(v, f)| (v.to_string(), f.to_string()))
                .collect(),
        )
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, v: &str, f: &str) -> bool {
        self.edges.contains(&(v.to_string(), f.to_string()))
    }

    pub fn is_matched(&self, x: &str) -> bool {
        self.edges.iter().any(|(v, f)| v == x || f == x)
    }

    /// The partner of `x`, if matched.
    pub fn partner(&self, x: &str) -> Option<&str> {
        self.edges.iter().find_map(|(v, f)| {
            if v == x {
                Some(f.as_str())
            } else if f == x {
                Some(v.as_str())
            } else {
                None
            }
        })
    }

    /// Partners of every matched vertex in `set`.
    pub fn partners_of_set(&self, set: &BTreeSet<String>) -> BTreeSet<String> {
        set.iter()
            .filter_map(|x| self.partner(x).map(|p| p.to_string()))
            .collect()
    }
}

/// Coarse (Dulmage-Mendelsohn) decomposition of a bipartite graph into the
/// incomplete part (fewer constraints than variables), the complete part
/// (square, self-contained), and the overcomplete part (more constraints
/// than variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseDecomposition {
    pub incomplete: BTreeSet<String>,
    pub complete: BTreeSet<String>,
    pub overcomplete: BTreeSet<String>,
}

/// Maximum-cardinality matching via Hopcroft-Karp. Edges are iterated in
/// lexicographic (v, f) order so runs are reproducible; all consumers are
/// tested to be matching-invariant.
pub fn maximum_matching(graph: &BipartiteGraph) -> Matching {
    let vars: Vec<&String> = graph.variables().iter().collect();
    let cons: Vec<&String> = graph.constraints().iter().collect();
    let var_index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let con_index: BTreeMap<&str, usize> = cons
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_str(), i))
        .collect();
    let mut adj = vec![Vec::new(); vars.len()];
    for (v, f) in graph.edges() {
        adj[var_index[v.as_str()]].push(con_index[f.as_str()]);
    }

    const UNMATCHED: usize = usize::MAX;
    let mut match_v = vec![UNMATCHED; vars.len()];
    let mut match_f = vec![UNMATCHED; cons.len()];

    loop {
        // BFS layering from free variable vertices.
        let mut dist = vec![usize::MAX; vars.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (u, &m) in match_v.iter().enumerate() {
            if m == UNMATCHED {
                dist[u] = 0;
                queue.push_back(u);
            }
        }
        let mut reached_free = false;
        while let Some(u) = queue.pop_front() {
            for &f in &adj[u] {
                let w = match_f[f];
                if w == UNMATCHED {
                    reached_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reached_free {
            break;
        }

        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            match_v: &mut [usize],
            match_f: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            let d = std::mem::replace(&mut dist[u], usize::MAX);
            for &f in &adj[u] {
                let w = match_f[f];
                if w == usize::MAX || (dist[w] == d + 1 && augment(w, adj, match_v, match_f, dist))
                {
                    match_v[u] = f;
                    match_f[f] = u;
                    return true;
                }
            }
            false
        }

        for u in 0..vars.len() {
            if match_v[u] == UNMATCHED && dist[u] == 0 {
                augment(u, &adj, &mut match_v, &mut match_f, &mut dist);
            }
        }
    }

    let edges = match_v
        .iter()
        .enumerate()
        .filter(|(_, &f)| f != UNMATCHED)
        .map(|(u, &f)| (vars[u].clone(), cons[f].clone()))
        .collect();
    Matching { edges }
}

/// A matching covering every vertex of `V` and `F`, or an error when none
/// exists.
pub fn perfect_matching(graph: &BipartiteGraph) -> Result<Matching> {
    let m = maximum_matching(graph);
    if m.len() == graph.variables().len() && m.len() == graph.constraints().len() {
        Ok(m)
    } else {
        Err(Error::NoPerfectMatching)
    }
}

/// True iff `|F| = |V|` and a perfect matching exists, which is equivalent
/// to the Hall property on every constraint subset.
pub fn is_self_contained(graph: &BipartiteGraph) -> bool {
    graph.variables().len() == graph.constraints().len()
        && maximum_matching(graph).len() == graph.constraints().len()
}

/// Self-containedness by literal subset enumeration: `|F''| <= |adj(F'')|`
/// for every subset of F, plus `|F| = |V|`. Independent oracle for
/// `is_self_contained`; capped at [`BRUTE_FORCE_CAP`] constraints.
pub fn hall_check_bruteforce(graph: &BipartiteGraph) -> Result<bool> {
    let cons: Vec<&String> = graph.constraints().iter().collect();
    if cons.len() > BRUTE_FORCE_CAP {
        return Err(Error::SizeLimit {
            what: "constraint set",
            actual: cons.len(),
            limit: BRUTE_FORCE_CAP,
        });
    }
    if graph.variables().len() != cons.len() {
        return Ok(false);
    }
    let adjacency: Vec<BTreeSet<String>> = cons
        .iter()
        .map(|f| graph.adjacency_of_constraint(f))
        .collect();
    for mask in 0u32..(1u32 << cons.len()) {
        let mut union = BTreeSet::new();
        let mut size = 0usize;
        for (i, adj) in adjacency.iter().enumerate() {
            if mask & (1 << i) != 0 {
                size += 1;
                union.extend(adj.iter().cloned());
            }
        }
        if size > union.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subset_is_self_contained(subset: &BTreeSet<String>, graph: &BipartiteGraph) -> bool {
    let members: Vec<&String> = subset.iter().collect();
    let adjacency: Vec<BTreeSet<String>> = members
        .iter()
        .map(|f| graph.adjacency_of_constraint(f))
        .collect();
    let full: BTreeSet<String> = adjacency.iter().flatten().cloned().collect();
    if full.len() != members.len() {
        return false;
    }
    // Hall property over every nonempty strict subset.
    for mask in 1u32..(1u32 << members.len()) - 1 {
        let mut union = BTreeSet::new();
        let mut size = 0usize;
        for (i, adj) in adjacency.iter().enumerate() {
            if mask & (1 << i) != 0 {
                size += 1;
                union.extend(adj.iter().cloned());
            }
        }
        if size > union.len() {
            return false;
        }
    }
    true
}

/// All minimal self-contained constraint sets of a self-contained graph,
/// found by enumerating subsets in increasing size and skipping supersets
/// of sets already found. Matching-free by design.
pub fn minimal_self_contained_sets(graph: &BipartiteGraph) -> Result<Vec<BTreeSet<String>>> {
    let cons: Vec<String> = graph.constraints().iter().cloned().collect();
    if cons.len() > BRUTE_FORCE_CAP {
        return Err(Error::SizeLimit {
            what: "constraint set",
            actual: cons.len(),
            limit: BRUTE_FORCE_CAP,
        });
    }
    if !is_self_contained(graph) {
        return Err(Error::NotSelfContained);
    }
    let mut found: Vec<BTreeSet<String>> = Vec::new();
    for size in 1..=cons.len() {
        let mut chosen = Vec::with_capacity(size);
        enumerate_subsets(&cons, size, 0, &mut chosen, &mut |subset| {
            if found.iter().any(|s| s.is_subset(subset)) {
                return;
            }
            if subset_is_self_contained(subset, graph) {
                found.push(subset.clone());
            }
        });
    }
    found.sort();
    Ok(found)
}

fn enumerate_subsets(
    items: &[String],
    size: usize,
    start: usize,
    chosen: &mut Vec<String>,
    visit: &mut impl FnMut(&BTreeSet<String>),
) {
    if chosen.len() == size {
        let subset: BTreeSet<String> = chosen.iter().cloned().collect();
        visit(&subset);
        return;
    }
    let remaining = size - chosen.len();
    for i in start..=items.len().saturating_sub(remaining) {
        chosen.push(items[i].clone());
        enumerate_subsets(items, size, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Vertices connected to a seed by a path whose edges lie alternatingly
/// outside and inside the matching, seeds included. Seeds must be unmatched.
pub fn alternating_reachable(
    graph: &BipartiteGraph,
    matching: &Matching,
    seeds: &BTreeSet<String>,
) -> Result<BTreeSet<String>> {
    for s in seeds {
        if !graph.contains_vertex(s) {
            return Err(Error::UnknownVertex(s.clone()));
        }
        if matching.is_matched(s) {
            return Err(Error::MatchedSeed(s.clone()));
        }
    }
    let neighbors = |x: &str| -> Vec<String> {
        graph
            .edges()
            .iter()
            .filter_map(|(v, f)| {
                if v == x {
                    Some(f.clone())
                } else if f == x {
                    Some(v.clone())
                } else {
                    None
                }
            })
            .collect()
    };

    // State: (vertex, arrived via matched edge). Seeds behave as if they were
    // entered by a matched edge: the first step must leave by a non-matching
    // edge, after which edges alternate.
    let mut reached: BTreeSet<String> = seeds.clone();
    let mut seen: BTreeSet<(String, bool)> = seeds.iter().map(|s| (s.clone(), true)).collect();
    let mut queue: VecDeque<(String, bool)> = seen.iter().cloned().collect();
    while let Some((x, via_matched)) = queue.pop_front() {
        for y in neighbors(&x) {
            let edge_matched = matching.partner(&x) == Some(y.as_str());
            if edge_matched == via_matched {
                continue; // must alternate
            }
            reached.insert(y.clone());
            if seen.insert((y.clone(), edge_matched)) {
                queue.push_back((y, edge_matched));
            }
        }
    }
    Ok(reached)
}

/// Coarse decomposition with an internally chosen maximum matching. The
/// result is independent of that choice.
pub fn coarse_decomposition(graph: &BipartiteGraph) -> CoarseDecomposition {
    let m = maximum_matching(graph);
    coarse_decomposition_with(graph, &m).expect("maximum matching leaves seeds unmatched")
}

/// Coarse decomposition for a caller-supplied maximum matching; exposed so
/// invariance across matchings can be exercised directly.
pub fn coarse_decomposition_with(
    graph: &BipartiteGraph,
    matching: &Matching,
) -> Result<CoarseDecomposition> {
    let unmatched_vars: BTreeSet<String> = graph
        .variables()
        .iter()
        .filter(|v| !matching.is_matched(v))
        .cloned()
        .collect();
    let unmatched_cons: BTreeSet<String> = graph
        .constraints()
        .iter()
        .filter(|f| !matching.is_matched(f))
        .cloned()
        .collect();
    let incomplete = alternating_reachable(graph, matching, &unmatched_vars)?;
    let overcomplete = alternating_reachable(graph, matching, &unmatched_cons)?;
    let complete: BTreeSet<String> = graph
        .variables()
        .iter()
        .chain(graph.constraints())
        .filter(|x| !incomplete.contains(*x) && !overcomplete.contains(*x))
        .cloned()
        .collect();
    Ok(CoarseDecomposition {
        incomplete,
        complete,
        overcomplete,
    })
}
