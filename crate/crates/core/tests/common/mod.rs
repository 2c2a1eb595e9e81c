//! Shared helpers for the integration suites: deterministic random
//! generators, exhaustive matching enumeration, and the recurring example
//! graphs.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use causal_ordering::matching::{maximum_matching, Matching};
use causal_ordering::system::{
    ConstraintDecl, ConstraintForm, Domain, ExogenousDistribution, SystemOfConstraints,
    VariableDecl,
};
use causal_ordering::{BipartiteGraph, DirectedMixedGraph};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn ids(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------

/// Random bipartite graph over `n_v` variables and `n_f` constraints with
/// independent edge probability `p`.
pub fn random_bipartite(rng: &mut ChaCha12Rng, n_v: usize, n_f: usize, p: f64) -> BipartiteGraph {
    let variables: Vec<String> = (0..n_v).map(|i| format!("v{i}")).collect();
    let constraints: Vec<String> = (0..n_f).map(|i| format!("f{i}")).collect();
    let mut edges = BTreeSet::new();
    for v in &variables {
        for f in &constraints {
            if rng.gen_bool(p) {
                edges.insert((v.clone(), f.clone()));
            }
        }
    }
    BipartiteGraph::new(
        variables.into_iter().collect(),
        constraints.into_iter().collect(),
        edges,
        BTreeSet::new(),
    )
    .expect("generated graph is well-formed")
}

/// Random self-contained graph on `n` variable/constraint pairs: a random
/// permutation matching guarantees the perfect matching, extra edges are
/// added with probability `extra_p`.
pub fn random_self_contained(rng: &mut ChaCha12Rng, n: usize, extra_p: f64) -> BipartiteGraph {
    let variables: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let constraints: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    let mut permutation: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        permutation.swap(i, j);
    }
    let mut edges = BTreeSet::new();
    for (i, v) in variables.iter().enumerate() {
        edges.insert((v.clone(), constraints[permutation[i]].clone()));
        for f in &constraints {
            if rng.gen_bool(extra_p) {
                edges.insert((v.clone(), f.clone()));
            }
        }
    }
    BipartiteGraph::new(
        variables.into_iter().collect(),
        constraints.into_iter().collect(),
        edges,
        BTreeSet::new(),
    )
    .expect("generated graph is well-formed")
}

/// Attach up to `max_w` exogenous vertices, each adjacent to a random
/// nonempty subset of constraints.
pub fn with_random_exogenous(
    rng: &mut ChaCha12Rng,
    graph: &BipartiteGraph,
    max_w: usize,
) -> BipartiteGraph {
    let constraints: Vec<String> = graph.constraints().iter().cloned().collect();
    let mut variables = graph.variables().clone();
    let mut exogenous = graph.exogenous().clone();
    let mut edges = graph.edges().clone();
    let count = if max_w == 0 { 0 } else { rng.gen_range(0..=max_w) };
    for i in 0..count {
        let w = format!("w{i}");
        variables.insert(w.clone());
        exogenous.insert(w.clone());
        if !constraints.is_empty() {
            let mut attached = false;
            for f in &constraints {
                if rng.gen_bool(0.4) {
                    edges.insert((w.clone(), f.clone()));
                    attached = true;
                }
            }
            if !attached {
                let f = &constraints[rng.gen_range(0..constraints.len())];
                edges.insert((w.clone(), f.clone()));
            }
        }
    }
    BipartiteGraph::new(variables, graph.constraints().clone(), edges, exogenous)
        .expect("generated graph is well-formed")
}

/// Random directed mixed graph on `n` vertices.
pub fn random_dmg(rng: &mut ChaCha12Rng, n: usize, p_directed: f64, p_bidirected: f64) -> DirectedMixedGraph {
    let vertices: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut directed = BTreeSet::new();
    let mut bidirected = Vec::new();
    for a in &vertices {
        for b in &vertices {
            if a != b && rng.gen_bool(p_directed) {
                directed.insert((a.clone(), b.clone()));
            }
        }
    }
    for (i, a) in vertices.iter().enumerate() {
        for b in vertices.iter().skip(i + 1) {
            if rng.gen_bool(p_bidirected) {
                bidirected.push((a.clone(), b.clone()));
            }
        }
    }
    DirectedMixedGraph::new(vertices.into_iter().collect(), directed, bidirected)
        .expect("generated graph is well-formed")
}

/// Random solvable linear-Gaussian system with at most `max_endogenous`
/// endogenous variables. Every constraint is matched to one variable and
/// carries its own exogenous noise; coefficients lie in
/// `[-2, -0.5] ∪ [0.5, 2]`. Retries deterministically until the causal
/// ordering clusters are well-conditioned.
pub fn random_linear_gaussian(seed: u64, max_endogenous: usize) -> SystemOfConstraints {
    for attempt in 0..64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(attempt));
        let system = random_linear_gaussian_attempt(&mut rng, max_endogenous);
        if let Ok(reports) = causal_ordering::numeric::check_solvability(&system) {
            if reports.iter().all(|r| r.solvable && r.condition > 1e-6) {
                return system;
            }
        }
    }
    panic!("no solvable system found for seed {seed}");
}

fn coefficient(rng: &mut ChaCha12Rng) -> f64 {
    let magnitude = rng.gen_range(0.5..=2.0);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

fn random_linear_gaussian_attempt(
    rng: &mut ChaCha12Rng,
    max_endogenous: usize,
) -> SystemOfConstraints {
    let n = rng.gen_range(2..=max_endogenous);
    let mut variables = Vec::new();
    let mut constraints = Vec::new();
    for i in 0..n {
        variables.push(VariableDecl {
            id: format!("v{i}"),
            exogenous: false,
            domain: Domain::Real,
            distribution: None,
        });
        variables.push(VariableDecl {
            id: format!("w{i}"),
            exogenous: true,
            domain: Domain::Real,
            distribution: Some(ExogenousDistribution::Normal {
                mean: 0.0,
                sigma: 1.0,
            }),
        });
    }
    for i in 0..n {
        let mut coefficients: BTreeMap<String, f64> = BTreeMap::new();
        coefficients.insert(format!("v{i}"), coefficient(rng));
        coefficients.insert(format!("w{i}"), coefficient(rng));
        for j in 0..n {
            if j != i && rng.gen_bool(0.3) {
                coefficients.insert(format!("v{j}"), coefficient(rng));
            }
        }
        constraints.push(ConstraintDecl {
            id: format!("f{i}"),
            variables: coefficients.keys().cloned().collect(),
            form: ConstraintForm::Linear,
            coefficients,
            constant: Some(0.0),
        });
    }
    let system = SystemOfConstraints {
        variables,
        constraints,
    };
    system.validate().expect("generated system is valid");
    system
}

// ---------------------------------------------------------------------
// Exhaustive enumeration oracles
// ---------------------------------------------------------------------

fn edges_sorted(graph: &BipartiteGraph) -> Vec<(String, String)> {
    graph.edges().iter().cloned().collect()
}

fn enumerate_matchings_from(
    edges: &[(String, String)],
    index: usize,
    used: &mut BTreeSet<String>,
    current: &mut Vec<(String, String)>,
    visit: &mut impl FnMut(&[(String, String)]),
) {
    if index == edges.len() {
        visit(current);
        return;
    }
    let (v, f) = &edges[index];
    enumerate_matchings_from(edges, index + 1, used, current, visit);
    if !used.contains(v) && !used.contains(f) {
        used.insert(v.clone());
        used.insert(f.clone());
        current.push((v.clone(), f.clone()));
        enumerate_matchings_from(edges, index + 1, used, current, visit);
        current.pop();
        used.remove(v);
        used.remove(f);
    }
}

/// Size of the largest matching, found by enumerating every matching.
pub fn maximum_matching_size_bruteforce(graph: &BipartiteGraph) -> usize {
    let edges = edges_sorted(graph);
    let mut best = 0;
    enumerate_matchings_from(
        &edges,
        0,
        &mut BTreeSet::new(),
        &mut Vec::new(),
        &mut |m| best = best.max(m.len()),
    );
    best
}

/// Every maximum-cardinality matching.
pub fn all_maximum_matchings(graph: &BipartiteGraph) -> Vec<Matching> {
    let target = maximum_matching(graph).len();
    let edges = edges_sorted(graph);
    let mut out = Vec::new();
    enumerate_matchings_from(
        &edges,
        0,
        &mut BTreeSet::new(),
        &mut Vec::new(),
        &mut |m| {
            if m.len() == target {
                out.push(
                    Matching::new(graph, m.iter().cloned().collect())
                        .expect("enumerated matching is valid"),
                );
            }
        },
    );
    out
}

/// Every perfect matching (covering all vertices of both sides).
pub fn all_perfect_matchings(graph: &BipartiteGraph) -> Vec<Matching> {
    if graph.variables().len() != graph.constraints().len() {
        return Vec::new();
    }
    let target = graph.variables().len();
    all_maximum_matchings(graph)
        .into_iter()
        .filter(|m| m.len() == target)
        .collect()
}

// ---------------------------------------------------------------------
// Recurring example graphs
// ---------------------------------------------------------------------

/// Self-contained five-pair graph: f1-{v1}, f2-{v1,v2,v3}, f3-{v3,v4},
/// f4-{v2,v4}, f5-{v4,v5}.
pub fn five_chain() -> BipartiteGraph {
    BipartiteGraph::from_edges(
        &["v1", "v2", "v3", "v4", "v5"],
        &["f1", "f2", "f3", "f4", "f5"],
        &[
            ("v1", "f1"),
            ("v1", "f2"),
            ("v2", "f2"),
            ("v3", "f2"),
            ("v3", "f3"),
            ("v4", "f3"),
            ("v2", "f4"),
            ("v4", "f4"),
            ("v4", "f5"),
            ("v5", "f5"),
        ],
        &[],
    )
    .unwrap()
}

/// The five-pair graph with one exogenous parent per constraint (two on f2).
pub fn five_chain_exogenous() -> BipartiteGraph {
    BipartiteGraph::from_edges(
        &[
            "v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5", "w6",
        ],
        &["f1", "f2", "f3", "f4", "f5"],
        &[
            ("v1", "f1"),
            ("v1", "f2"),
            ("v2", "f2"),
            ("v3", "f2"),
            ("v3", "f3"),
            ("v4", "f3"),
            ("v2", "f4"),
            ("v4", "f4"),
            ("v4", "f5"),
            ("v5", "f5"),
            ("w1", "f1"),
            ("w2", "f2"),
            ("w3", "f2"),
            ("w4", "f3"),
            ("w5", "f4"),
            ("w6", "f5"),
        ],
        &["w1", "w2", "w3", "w4", "w5", "w6"],
    )
    .unwrap()
}

/// Unbalanced graph (overdetermined v1, underdetermined {v4, v5}) without
/// exogenous vertices.
pub fn unbalanced_endogenous() -> BipartiteGraph {
    BipartiteGraph::from_edges(
        &["v1", "v2", "v3", "v4", "v5"],
        &["f1", "f2", "f3", "f4", "f5"],
        &[
            ("v1", "f1"),
            ("v1", "f2"),
            ("v1", "f3"),
            ("v2", "f3"),
            ("v2", "f4"),
            ("v3", "f4"),
            ("v3", "f5"),
            ("v4", "f5"),
            ("v5", "f5"),
        ],
        &[],
    )
    .unwrap()
}

/// The unbalanced graph with one exogenous parent per constraint.
pub fn unbalanced_full() -> BipartiteGraph {
    BipartiteGraph::from_edges(
        &[
            "v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5",
        ],
        &["f1", "f2", "f3", "f4", "f5"],
        &[
            ("v1", "f1"),
            ("v1", "f2"),
            ("v1", "f3"),
            ("v2", "f3"),
            ("v2", "f4"),
            ("v3", "f4"),
            ("v3", "f5"),
            ("v4", "f5"),
            ("v5", "f5"),
            ("w1", "f1"),
            ("w2", "f2"),
            ("w3", "f3"),
            ("w4", "f4"),
            ("w5", "f5"),
        ],
        &["w1", "w2", "w3", "w4", "w5"],
    )
    .unwrap()
}

/// All small vertex subsets of `pool` up to `cap` elements, including the
/// empty set.
pub fn subsets_up_to(pool: &[String], cap: usize) -> Vec<BTreeSet<String>> {
    let mut out: Vec<BTreeSet<String>> = vec![BTreeSet::new()];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 1..=cap.min(pool.len()) {
        let mut next = Vec::new();
        for indices in &frontier {
            let start = indices.last().map(|i| i + 1).unwrap_or(0);
            for index in start..pool.len() {
                let mut extended = indices.clone();
                extended.push(index);
                out.push(extended.iter().map(|i| pool[*i].clone()).collect());
                next.push(extended);
            }
        }
        frontier = next;
    }
    out
}
