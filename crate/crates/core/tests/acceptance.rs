#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! with its elapsed time. Tolerances and budgets are pinned in code.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use causal_ordering::cluster_graph::cluster_graph;
use causal_ordering::fixtures;
use causal_ordering::interventions::{
    check_commutation, do_on_cluster_graph, intervene_graph, predict_perfect_effects,
    predict_soft_effects, InterventionSpec, PerfectInterventionSpec, SoftInterventionSpec,
};
use causal_ordering::markov::{
    acyclify, marginalize, markov_ordering_graph, markov_ordering_restricted,
};
use causal_ordering::matching::{
    coarse_decomposition, coarse_decomposition_with, is_self_contained, Matching,
};
use causal_ordering::numeric::{
    solve, substream, verify_intervention_effects, verify_markov, NON_EFFECT_TOLERANCE,
};
use causal_ordering::ordering::{
    clusterize, merge, order_cd, order_msc, order_pm, order_pm_with, orient,
};
use causal_ordering::separation::{d_separated, d_separated_bruteforce, sigma_separated};
use causal_ordering::system::{bipartite_of, load_system};
use causal_ordering::{BipartiteGraph, DirectedClusterGraph, DirectedMixedGraph};
use rand::Rng;

use common::*;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn gate(name: &str, budget: Duration, check: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => {
            println!("{name}: PASS ({elapsed:.2?}, budget {budget:.0?})");
            assert!(
                elapsed <= budget,
                "{name} exceeded its time budget: {elapsed:.2?} > {budget:.0?}"
            );
        }
        Err(message) => {
            println!("{name}: FAIL - {message}");
            panic!("{name} failed: {message}");
        }
    }
}

fn bathtub_fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bathtub.json")
}

fn expected_bathtub_ordering() -> DirectedClusterGraph {
    cluster_graph(
        &[
            &["f_K", "v_K"],
            &["f_I", "v_I"],
            &["f_O", "v_P"],
            &["f_D", "v_O"],
            &["f_P", "v_D"],
            &["w_1"],
            &["w_2"],
            &["w_3"],
            &["w_4"],
            &["w_5"],
            &["w_I"],
            &["w_K"],
        ],
        &[
            ("w_K", "v_K"),
            ("w_I", "v_I"),
            ("w_1", "v_D"),
            ("w_2", "v_D"),
            ("w_3", "v_P"),
            ("w_4", "v_P"),
            ("w_5", "v_O"),
            ("v_I", "v_O"),
            ("v_O", "v_P"),
            ("v_K", "v_P"),
            ("v_P", "v_D"),
        ],
    )
    .expect("expected graph is well-formed")
}

#[test]
fn criterion_01_bathtub_causal_ordering() {
    gate(
        "criterion 01 bathtub causal ordering",
        Duration::from_secs(1),
        || {
            let system = load_system(bathtub_fixture_path()).map_err(|e| e.to_string())?;
            let graph = bipartite_of(&system);
            let expected = expected_bathtub_ordering();
            ensure!(order_cd(&graph) == expected, "order_cd differs");
            ensure!(
                order_pm(&graph).map_err(|e| e.to_string())? == expected,
                "order_pm differs"
            );
            ensure!(
                order_msc(&graph).map_err(|e| e.to_string())? == expected,
                "order_msc differs"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_02_bathtub_markov_ordering() {
    gate(
        "criterion 02 bathtub markov ordering graph",
        Duration::from_secs(1),
        || {
            let system = load_system(bathtub_fixture_path()).map_err(|e| e.to_string())?;
            let graph = bipartite_of(&system);
            let markov = markov_ordering_graph(&graph);
            let endogenous_view = marginalize(&markov, graph.exogenous())
                .map_err(|e| e.to_string())?;
            let expected = DirectedMixedGraph::from_edges(
                &["v_D", "v_I", "v_K", "v_O", "v_P"],
                &[
                    ("v_I", "v_O"),
                    ("v_O", "v_P"),
                    ("v_K", "v_P"),
                    ("v_P", "v_D"),
                ],
                &[],
            )
            .expect("expected graph is well-formed");
            ensure!(
                endogenous_view == expected,
                "endogenous Markov ordering view differs"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_03_paper_figure_golden_suite() {
    gate(
        "criterion 03 golden figure suite",
        Duration::from_secs(5),
        || {
            // Two-equation system: ordering into a two-step chain.
            let two = bipartite_of(&fixtures::two_equations());
            let expected_two = cluster_graph(
                &[&["f_1", "v_1"], &["f_2", "v_2"], &["w_1"], &["w_2"]],
                &[("w_1", "v_1"), ("v_1", "v_2"), ("w_2", "v_2")],
            )
            .expect("well-formed");
            ensure!(order_msc(&two).map_err(|e| e.to_string())? == expected_two, "two-equation ordering differs");

            // Five-pair graph: both orientations, their shared clustering,
            // and the merged causal ordering graph.
            let graph = five_chain_exogenous();
            let m1 = Matching::from_pairs(
                &graph,
                &[("v1", "f1"), ("v2", "f2"), ("v3", "f3"), ("v4", "f4"), ("v5", "f5")],
            )
            .map_err(|e| e.to_string())?;
            let m2 = Matching::from_pairs(
                &graph,
                &[("v1", "f1"), ("v3", "f2"), ("v4", "f3"), ("v2", "f4"), ("v5", "f5")],
            )
            .map_err(|e| e.to_string())?;

            let oriented_m1 = orient(&graph, &m1).map_err(|e| e.to_string())?;
            let expected_m1 = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5", "w6", "f1", "f2", "f3", "f4", "f5"],
                &[
                    ("f1", "v1"),
                    ("f2", "v2"),
                    ("f3", "v3"),
                    ("f4", "v4"),
                    ("f5", "v5"),
                    ("v1", "f2"),
                    ("v3", "f2"),
                    ("v4", "f3"),
                    ("v2", "f4"),
                    ("v4", "f5"),
                    ("w1", "f1"),
                    ("w2", "f2"),
                    ("w3", "f2"),
                    ("w4", "f3"),
                    ("w5", "f4"),
                    ("w6", "f5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(oriented_m1 == expected_m1, "orientation along m1 differs");

            let oriented_m2 = orient(&graph, &m2).map_err(|e| e.to_string())?;
            let expected_m2 = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5", "w6", "f1", "f2", "f3", "f4", "f5"],
                &[
                    ("f1", "v1"),
                    ("f2", "v3"),
                    ("f3", "v4"),
                    ("f4", "v2"),
                    ("f5", "v5"),
                    ("v1", "f2"),
                    ("v2", "f2"),
                    ("v3", "f3"),
                    ("v4", "f4"),
                    ("v4", "f5"),
                    ("w1", "f1"),
                    ("w2", "f2"),
                    ("w3", "f2"),
                    ("w4", "f3"),
                    ("w5", "f4"),
                    ("w6", "f5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(oriented_m2 == expected_m2, "orientation along m2 differs");

            let clustered = clusterize(&oriented_m1);
            let expected_clustered = cluster_graph(
                &[
                    &["v1"],
                    &["f1"],
                    &["v2", "v3", "v4", "f2", "f3", "f4"],
                    &["v5"],
                    &["f5"],
                    &["w1"],
                    &["w2"],
                    &["w3"],
                    &["w4"],
                    &["w5"],
                    &["w6"],
                ],
                &[
                    ("f1", "v1"),
                    ("w1", "f1"),
                    ("v1", "f2"),
                    ("w2", "f2"),
                    ("w3", "f2"),
                    ("w4", "f2"),
                    ("w5", "f2"),
                    ("v4", "f5"),
                    ("w6", "f5"),
                    ("f5", "v5"),
                ],
            )
            .expect("well-formed");
            ensure!(clustered == expected_clustered, "clustered graph differs");
            ensure!(
                clusterize(&oriented_m2) == expected_clustered,
                "clustering is matching-dependent"
            );

            let expected_ordering = cluster_graph(
                &[
                    &["f1", "v1"],
                    &["f2", "f3", "f4", "v2", "v3", "v4"],
                    &["f5", "v5"],
                    &["w1"],
                    &["w2"],
                    &["w3"],
                    &["w4"],
                    &["w5"],
                    &["w6"],
                ],
                &[
                    ("w1", "v1"),
                    ("v1", "v2"),
                    ("w2", "v2"),
                    ("w3", "v2"),
                    ("w4", "v2"),
                    ("w5", "v2"),
                    ("v4", "v5"),
                    ("w6", "v5"),
                ],
            )
            .expect("well-formed");
            ensure!(
                merge(&clustered, &m1) == expected_ordering,
                "merged ordering differs"
            );
            ensure!(
                order_pm_with(&graph, &m2).map_err(|e| e.to_string())? == expected_ordering,
                "ordering differs under m2"
            );

            // Coarse decomposition of the unbalanced endogenous graph.
            let unbalanced = unbalanced_endogenous();
            let cd = coarse_decomposition(&unbalanced);
            ensure!(cd.overcomplete == set(&["v1", "f1", "f2"]), "overcomplete part differs");
            ensure!(cd.complete == set(&["v2", "v3", "f3", "f4"]), "complete part differs");
            ensure!(cd.incomplete == set(&["v4", "v5", "f5"]), "incomplete part differs");

            // Causal ordering of the full unbalanced graph.
            let full = unbalanced_full();
            let expected_full = cluster_graph(
                &[
                    &["v1", "f1", "f2"],
                    &["v2", "f3"],
                    &["v3", "f4"],
                    &["v4", "v5", "f5"],
                    &["w1"],
                    &["w2"],
                    &["w3"],
                    &["w4"],
                    &["w5"],
                ],
                &[
                    ("v1", "f3"),
                    ("v2", "f4"),
                    ("v3", "f5"),
                    ("w1", "f1"),
                    ("w2", "f2"),
                    ("w3", "f3"),
                    ("w4", "f4"),
                    ("w5", "f5"),
                ],
            )
            .expect("well-formed");
            ensure!(order_cd(&full) == expected_full, "unbalanced ordering differs");

            // Markov ordering graph of the unbalanced system, full and
            // restricted to the complete and overcomplete parts.
            let markov = markov_ordering_graph(&full);
            let expected_markov = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5"],
                &[
                    ("v1", "v2"),
                    ("v2", "v3"),
                    ("v3", "v4"),
                    ("v3", "v5"),
                    ("w1", "v1"),
                    ("w2", "v1"),
                    ("w3", "v2"),
                    ("w4", "v3"),
                    ("w5", "v4"),
                    ("w5", "v5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(markov == expected_markov, "unbalanced Markov ordering differs");

            let restricted = markov_ordering_restricted(&full);
            let expected_restricted = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "w1", "w2", "w3", "w4", "w5"],
                &[
                    ("v1", "v2"),
                    ("v2", "v3"),
                    ("w1", "v1"),
                    ("w2", "v1"),
                    ("w3", "v2"),
                    ("w4", "v3"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(restricted == expected_restricted, "restricted Markov ordering differs");

            // Feedback system: Markov ordering of the five-pair graph, its
            // endogenous marginal, and the two matched cyclic views.
            let markov_feedback = markov_ordering_graph(&graph);
            let expected_feedback = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5", "w1", "w2", "w3", "w4", "w5", "w6"],
                &[
                    ("v1", "v2"),
                    ("v1", "v3"),
                    ("v1", "v4"),
                    ("v4", "v5"),
                    ("w1", "v1"),
                    ("w2", "v2"),
                    ("w2", "v3"),
                    ("w2", "v4"),
                    ("w3", "v2"),
                    ("w3", "v3"),
                    ("w3", "v4"),
                    ("w4", "v2"),
                    ("w4", "v3"),
                    ("w4", "v4"),
                    ("w5", "v2"),
                    ("w5", "v3"),
                    ("w5", "v4"),
                    ("w6", "v5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(markov_feedback == expected_feedback, "feedback Markov ordering differs");

            let marginal = marginalize(&markov_feedback, graph.exogenous())
                .map_err(|e| e.to_string())?;
            let expected_marginal = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5"],
                &[("v1", "v2"), ("v1", "v3"), ("v1", "v4"), ("v4", "v5")],
                &[("v2", "v3"), ("v2", "v4"), ("v3", "v4")],
            )
            .expect("well-formed");
            ensure!(marginal == expected_marginal, "marginalized Markov ordering differs");

            let all_latent: BTreeSet<String> = graph
                .constraints()
                .iter()
                .chain(graph.exogenous())
                .cloned()
                .collect();
            let cyclic_m1 = marginalize(&oriented_m1, &all_latent).map_err(|e| e.to_string())?;
            let expected_cyclic_m1 = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5"],
                &[
                    ("v1", "v2"),
                    ("v3", "v2"),
                    ("v2", "v4"),
                    ("v4", "v3"),
                    ("v4", "v5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(cyclic_m1 == expected_cyclic_m1, "cyclic view along m1 differs");

            let cyclic_m2 = marginalize(&oriented_m2, &all_latent).map_err(|e| e.to_string())?;
            let expected_cyclic_m2 = DirectedMixedGraph::from_edges(
                &["v1", "v2", "v3", "v4", "v5"],
                &[
                    ("v1", "v3"),
                    ("v2", "v3"),
                    ("v3", "v4"),
                    ("v4", "v2"),
                    ("v4", "v5"),
                ],
                &[],
            )
            .expect("well-formed");
            ensure!(cyclic_m2 == expected_cyclic_m2, "cyclic view along m2 differs");

            // The classic sigma-separation statement holds in both cyclic
            // views and as a d-separation in the marginal Markov ordering.
            for view in [&cyclic_m1, &cyclic_m2] {
                ensure!(
                    sigma_separated(view, &set(&["v1"]), &set(&["v5"]), &set(&["v4"]))
                        .map_err(|e| e.to_string())?,
                    "v1 and v5 are not sigma-separated by v4"
                );
            }
            ensure!(
                d_separated(&marginal, &set(&["v1"]), &set(&["v5"]), &set(&["v4"]))
                    .map_err(|e| e.to_string())?,
                "v1 and v5 are not d-separated by v4"
            );

            // Intervened middle-block system: bipartite rewiring and the
            // intervened cluster graph, via both routes.
            let block = bipartite_of(&fixtures::middle_block());
            let intervened = intervene_graph(&block, &ids(&["f_2", "f_3"]), &ids(&["v_2", "v_3"]))
                .map_err(|e| e.to_string())?;
            let expected_intervened = BipartiteGraph::from_edges(
                &["v_1", "v_2", "v_3", "v_4"],
                &["f_1", "f_2", "f_3", "f_4"],
                &[
                    ("v_1", "f_1"),
                    ("v_2", "f_2"),
                    ("v_3", "f_3"),
                    ("v_3", "f_4"),
                    ("v_4", "f_4"),
                ],
                &[],
            )
            .map_err(|e| e.to_string())?;
            ensure!(intervened == expected_intervened, "intervened bipartite graph differs");

            let expected_after = cluster_graph(
                &[&["f_1", "v_1"], &["f_2", "v_2"], &["f_3", "v_3"], &["f_4", "v_4"]],
                &[("v_3", "v_4")],
            )
            .expect("well-formed");
            ensure!(order_cd(&intervened) == expected_after, "ordering of intervened graph differs");
            ensure!(
                do_on_cluster_graph(&order_cd(&block), &ids(&["f_2", "f_3"]), &ids(&["v_2", "v_3"]))
                    .map_err(|e| e.to_string())?
                    == expected_after,
                "cluster-level intervention differs"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_04_algorithm_equivalence() {
    gate(
        "criterion 04 algorithm equivalence",
        Duration::from_secs(120),
        || {
            // Exhaustive over every bipartite graph with |V| = |F| <= 4.
            let mut exhaustive_checked = 0usize;
            for n in 0..=4usize {
                let variables: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
                let constraints: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
                let cells = n * n;
                for mask in 0u32..(1u32 << cells) {
                    let mut edges = BTreeSet::new();
                    for cell in 0..cells {
                        if mask & (1 << cell) != 0 {
                            edges.insert((
                                variables[cell / n.max(1)].clone(),
                                constraints[cell % n.max(1)].clone(),
                            ));
                        }
                    }
                    let graph = BipartiteGraph::new(
                        variables.iter().cloned().collect(),
                        constraints.iter().cloned().collect(),
                        edges,
                        BTreeSet::new(),
                    )
                    .map_err(|e| e.to_string())?;
                    if !is_self_contained(&graph) {
                        continue;
                    }
                    exhaustive_checked += 1;
                    let reference = order_msc(&graph).map_err(|e| e.to_string())?;
                    ensure!(
                        order_pm(&graph).map_err(|e| e.to_string())? == reference,
                        "pm mismatch at n={n} mask={mask}"
                    );
                    ensure!(
                        order_cd(&graph) == reference,
                        "cd mismatch at n={n} mask={mask}"
                    );
                }
            }
            ensure!(exhaustive_checked > 1000, "too few exhaustive graphs");

            // Random self-contained graphs up to 6+6 with random exogenous
            // parts; perfect matchings enumerated exhaustively up to 5+5.
            for seed in 0..300u64 {
                let mut r = rng(seed + 40_000);
                let n = r.gen_range(1..=6);
                let core = random_self_contained(&mut r, n, 0.3);
                let graph = with_random_exogenous(&mut r, &core, 3);
                let reference = order_msc(&graph).map_err(|e| e.to_string())?;
                ensure!(
                    order_pm(&graph).map_err(|e| e.to_string())? == reference,
                    "pm mismatch at seed {seed}"
                );
                ensure!(
                    order_cd(&graph) == reference,
                    "cd mismatch at seed {seed}"
                );
                if n <= 5 {
                    for matching in all_perfect_matchings(&graph.endogenous_subgraph()) {
                        ensure!(
                            order_pm_with(&graph, &matching).map_err(|e| e.to_string())?
                                == reference,
                            "matching-dependent ordering at seed {seed}"
                        );
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_05_coarse_decomposition_invariance() {
    gate(
        "criterion 05 coarse decomposition invariance",
        Duration::from_secs(120),
        || {
            for seed in 0..500u64 {
                let mut r = rng(seed + 50_000);
                let n_v = r.gen_range(0..=7);
                let n_f = r.gen_range(0..=7);
                let graph = random_bipartite(&mut r, n_v, n_f, 0.3);
                let reference = coarse_decomposition(&graph);
                for matching in all_maximum_matchings(&graph) {
                    ensure!(
                        coarse_decomposition_with(&graph, &matching)
                            .map_err(|e| e.to_string())?
                            == reference,
                        "decomposition depends on the matching at seed {seed}"
                    );
                }
                let complete = graph
                    .induced_subgraph(&reference.complete)
                    .map_err(|e| e.to_string())?;
                ensure!(
                    is_self_contained(&complete),
                    "complete part not self-contained at seed {seed}"
                );
                for (v, f) in graph.edges() {
                    ensure!(
                        !(reference.incomplete.contains(v) && !reference.incomplete.contains(f)),
                        "incomplete variable linked outward at seed {seed}"
                    );
                    ensure!(
                        !(reference.complete.contains(v) && reference.overcomplete.contains(f)),
                        "complete variable linked to overcomplete constraint at seed {seed}"
                    );
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_06_separation_oracle_equivalence() {
    gate(
        "criterion 06 separation oracle equivalence",
        Duration::from_secs(300),
        || {
            for seed in 0..300u64 {
                let mut r = rng(seed + 60_000);
                let n = r.gen_range(2..=8);
                let graph = random_dmg(&mut r, n, 0.2, 0.08);
                let acyclified = acyclify(&graph);
                let vertices: Vec<String> = graph.vertices().iter().cloned().collect();
                for (i, x) in vertices.iter().enumerate() {
                    for y in vertices.iter().skip(i + 1) {
                        let pool: Vec<String> = vertices
                            .iter()
                            .filter(|v| *v != x && *v != y)
                            .cloned()
                            .collect();
                        for z in subsets_up_to(&pool, 2) {
                            let xs: BTreeSet<String> = [x.clone()].into();
                            let ys: BTreeSet<String> = [y.clone()].into();
                            let efficient =
                                d_separated(&graph, &xs, &ys, &z).map_err(|e| e.to_string())?;
                            let oracle = d_separated_bruteforce(&graph, &xs, &ys, &z)
                                .map_err(|e| e.to_string())?;
                            ensure!(
                                efficient == oracle,
                                "d-separation mismatch at seed {seed}: {x} vs {y} given {z:?}"
                            );
                            let sigma =
                                sigma_separated(&graph, &xs, &ys, &z).map_err(|e| e.to_string())?;
                            let via_acyclification = d_separated(&acyclified, &xs, &ys, &z)
                                .map_err(|e| e.to_string())?;
                            ensure!(
                                sigma == via_acyclification,
                                "sigma/acyclification mismatch at seed {seed}: {x} vs {y} given {z:?}"
                            );
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_intervention_tables() {
    gate(
        "criterion 07 intervention tables",
        Duration::from_secs(1),
        || {
            let system = fixtures::bathtub();
            let graph = bipartite_of(&system);

            let soft_rows: [(&str, &[&str], &[&str]); 5] = [
                ("f_K", &["v_K", "v_P", "v_D"], &["v_I", "v_O"]),
                ("f_I", &["v_I", "v_P", "v_O", "v_D"], &["v_K"]),
                ("f_P", &["v_D"], &["v_K", "v_I", "v_P", "v_O"]),
                ("f_O", &["v_P", "v_D"], &["v_K", "v_I", "v_O"]),
                ("f_D", &["v_P", "v_O", "v_D"], &["v_K", "v_I"]),
            ];
            for (target, generic, none) in soft_rows {
                let prediction =
                    predict_soft_effects(&graph, target).map_err(|e| e.to_string())?;
                ensure!(
                    prediction.generic == set(generic) && prediction.none == set(none),
                    "soft effect row {target} differs: {prediction:?}"
                );
            }

            let perfect_rows: [(&[&str], &[&str], &[&str], &[&str]); 6] = [
                (&["f_K"], &["v_K"], &["v_K", "v_P", "v_D"], &["v_I", "v_O"]),
                (&["f_I"], &["v_I"], &["v_I", "v_P", "v_O", "v_D"], &["v_K"]),
                (&["f_P"], &["v_D"], &["v_D"], &["v_K", "v_I", "v_P", "v_O"]),
                (&["f_O"], &["v_P"], &["v_P", "v_D"], &["v_K", "v_I", "v_O"]),
                (&["f_D"], &["v_O"], &["v_P", "v_O", "v_D"], &["v_K", "v_I"]),
                (
                    &["f_P", "f_D", "f_O"],
                    &["v_D", "v_O", "v_P"],
                    &["v_P", "v_O", "v_D"],
                    &["v_K", "v_I"],
                ),
            ];
            for (targets_f, targets_v, generic, none) in perfect_rows {
                let prediction =
                    predict_perfect_effects(&graph, &ids(targets_f), &ids(targets_v))
                        .map_err(|e| e.to_string())?;
                ensure!(
                    prediction.generic == set(generic) && prediction.none == set(none),
                    "perfect effect row {targets_f:?} differs: {prediction:?}"
                );
            }

            // Reachability table on the structural-equation comparison graph.
            let scm = fixtures::bathtub_scm_graph();
            let reachability_rows: [(&str, &[&str], &[&str]); 5] = [
                ("v_K", &["v_K", "v_P", "v_O", "v_D"], &["v_I"]),
                ("v_I", &["v_I", "v_P", "v_O", "v_D"], &["v_K"]),
                ("v_P", &["v_P", "v_O", "v_D"], &["v_K", "v_I"]),
                ("v_O", &["v_P", "v_O", "v_D"], &["v_K", "v_I"]),
                ("v_D", &["v_P", "v_O", "v_D"], &["v_K", "v_I"]),
            ];
            for (target, descendants, rest) in reachability_rows {
                let reached = scm.descendants_of_set(&set(&[target]));
                ensure!(
                    reached == set(descendants),
                    "descendants of {target} differ: {reached:?}"
                );
                let complement: BTreeSet<String> = scm
                    .vertices()
                    .iter()
                    .filter(|v| !reached.contains(*v))
                    .cloned()
                    .collect();
                ensure!(complement == set(rest), "non-descendants of {target} differ");
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_closed_form_solutions() {
    gate(
        "criterion 08 closed-form solutions",
        Duration::from_secs(10),
        || {
            let system = fixtures::bathtub();
            let mut r = substream(808, "closed-form-draws");
            let relative = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            for draw in 0..1000 {
                let mut exogenous: BTreeMap<String, f64> = BTreeMap::new();
                for w in ["w_1", "w_2", "w_3", "w_4", "w_5", "w_I", "w_K"] {
                    exogenous.insert(w.to_string(), r.gen_range(0.2..5.0));
                }
                let pinned = r.gen_range(0.2..5.0);

                let observed = solve(&system, &exogenous).map_err(|e| e.to_string())?;
                for (v, expected) in fixtures::bathtub_closed_form::observed(&exogenous) {
                    ensure!(
                        relative(observed.values[&v], expected) < 1e-10,
                        "observed {v} off at draw {draw}"
                    );
                }

                let cases: [(&str, &str, fn(&BTreeMap<String, f64>, f64) -> BTreeMap<String, f64>); 3] = [
                    ("f_P", "v_D", fixtures::bathtub_closed_form::do_water_level_via_pressure),
                    ("f_D", "v_O", fixtures::bathtub_closed_form::do_outflow),
                    ("f_D", "v_D", fixtures::bathtub_closed_form::do_water_level_via_drain),
                ];
                for (constraint, variable, closed_form) in cases {
                    let intervened = causal_ordering::interventions::perfect_intervene(
                        &system,
                        &PerfectInterventionSpec {
                            pairs: vec![(constraint.into(), variable.into(), pinned)],
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    let solved = solve(&intervened, &exogenous).map_err(|e| e.to_string())?;
                    for (v, expected) in closed_form(&exogenous, pinned) {
                        ensure!(
                            relative(solved.values[&v], expected) < 1e-10,
                            "do({constraint},{variable}) {v} off at draw {draw}"
                        );
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_09_commutation() {
    gate(
        "criterion 09 intervention commutation",
        Duration::from_secs(60),
        || {
            let check_all_clusters = |graph: &BipartiteGraph| -> Result<(), String> {
                let ordering = order_cd(graph);
                for cluster in ordering.clusters() {
                    if cluster.iter().any(|x| graph.exogenous().contains(x)) {
                        continue;
                    }
                    let targets_f: Vec<String> = cluster
                        .iter()
                        .filter(|x| graph.constraints().contains(*x))
                        .cloned()
                        .collect();
                    let targets_v: Vec<String> = cluster
                        .iter()
                        .filter(|x| graph.variables().contains(*x))
                        .cloned()
                        .collect();
                    if targets_f.len() != targets_v.len() {
                        continue; // incomplete or overcomplete component
                    }
                    ensure!(
                        check_commutation(graph, &targets_f, &targets_v)
                            .map_err(|e| e.to_string())?,
                        "commutation failed on cluster {cluster:?}"
                    );
                }
                Ok(())
            };

            check_all_clusters(&bipartite_of(&fixtures::bathtub()))?;
            check_all_clusters(&bipartite_of(&fixtures::middle_block()))?;
            for seed in 0..200u64 {
                let mut r = rng(seed + 90_000);
                let n = r.gen_range(1..=6);
                let core = random_self_contained(&mut r, n, 0.25);
                let graph = with_random_exogenous(&mut r, &core, 3);
                check_all_clusters(&graph).map_err(|e| format!("seed {seed}: {e}"))?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_10_markov_property_statistics() {
    gate(
        "criterion 10 statistical Markov property",
        Duration::from_secs(300),
        || {
            let alpha = 0.001;
            let n = 100_000;

            // Bathtub with lognormal exogenous variables: every d-separated
            // query must fail to reject, the four classic independences
            // among them.
            let (bathtub_run, _) =
                verify_markov(&fixtures::bathtub(), alpha, n, 2024).map_err(|e| e.to_string())?;
            ensure!(
                bathtub_run.independent_rejections == 0,
                "{} bathtub independences rejected",
                bathtub_run.independent_rejections
            );
            ensure!(bathtub_run.sigma_mismatches == 0, "sigma mismatch on bathtub");
            let classic = [
                ("v_K", "v_O", vec![]),
                ("v_K", "v_D", vec!["v_P"]),
                ("v_I", "v_P", vec!["v_O"]),
                ("v_O", "v_D", vec!["v_P"]),
            ];
            for (x, y, z) in classic {
                let z: BTreeSet<String> = z.into_iter().map(|s: &str| s.to_string()).collect();
                let found = bathtub_run.queries.iter().find(|q| {
                    (q.x == x && q.y == y || q.x == y && q.y == x) && q.z == z
                });
                let query = found.ok_or_else(|| format!("query {x} vs {y} given {z:?} missing"))?;
                ensure!(
                    query.predicted_independent,
                    "{x} vs {y} given {z:?} not predicted independent"
                );
                ensure!(
                    query.p_value >= alpha,
                    "{x} vs {y} given {z:?} rejected with p={}",
                    query.p_value
                );
            }

            // Twenty random solvable linear-Gaussian systems: the total
            // false-rejection count stays within the Bonferroni expectation
            // plus two.
            let mut tested = 0usize;
            let mut rejected = 0usize;
            for seed in 0..20u64 {
                let system = random_linear_gaussian(seed + 100_000, 6);
                let (run, _) =
                    verify_markov(&system, alpha, n, seed).map_err(|e| e.to_string())?;
                tested += run.independent_total;
                rejected += run.independent_rejections;
                ensure!(run.sigma_mismatches == 0, "sigma mismatch at seed {seed}");
            }
            let budget = (alpha * tested as f64) + 2.0;
            ensure!(
                (rejected as f64) <= budget,
                "{rejected} of {tested} independences rejected (budget {budget:.2})"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_11_non_effect_equality() {
    gate(
        "criterion 11 almost-sure non-effects",
        Duration::from_secs(30),
        || {
            let system = fixtures::bathtub();
            let n = 10_000;
            let mut specs: Vec<InterventionSpec> = Vec::new();
            for target in ["f_K", "f_I", "f_P", "f_O", "f_D"] {
                let original = system.constraint(target).expect("declared");
                specs.push(InterventionSpec::Soft(SoftInterventionSpec {
                    target: target.to_string(),
                    form: original.form,
                    coefficients: original.coefficients.clone(),
                    constant: Some(original.constant() + 2.0f64.ln()),
                }));
            }
            let perfect_targets: [&[(&str, &str)]; 6] = [
                &[("f_K", "v_K")],
                &[("f_I", "v_I")],
                &[("f_P", "v_D")],
                &[("f_O", "v_P")],
                &[("f_D", "v_O")],
                &[("f_P", "v_D"), ("f_O", "v_P"), ("f_D", "v_O")],
            ];
            for pairs in perfect_targets {
                specs.push(InterventionSpec::Perfect(PerfectInterventionSpec {
                    pairs: pairs
                        .iter()
                        .enumerate()
                        .map(|(i, (f, v))| (f.to_string(), v.to_string(), 1.5 + i as f64))
                        .collect(),
                }));
            }
            for spec in &specs {
                let check = verify_intervention_effects(&system, spec, n, 77)
                    .map_err(|e| e.to_string())?;
                for non_effect in &check.non_effects {
                    ensure!(
                        non_effect.within_tolerance,
                        "{}: {} moved by {} (tolerance {NON_EFFECT_TOLERANCE})",
                        check.description,
                        non_effect.variable,
                        non_effect.max_abs_diff
                    );
                }
            }
            Ok(())
        },
    );
}
