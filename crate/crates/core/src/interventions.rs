//! Soft and perfect interventions on systems, bipartite graphs, and causal
//! ordering graphs, plus effect prediction from the causal ordering graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteGraph;
use crate::cluster_graph::DirectedClusterGraph;
use crate::error::{Error, Result};
use crate::matching::coarse_decomposition;
use crate::ordering::order_cd;
use crate::system::{ConstraintDecl, ConstraintForm, Domain, SystemOfConstraints};

/// A soft intervention ("mechanism change"): replace the numeric form and
/// constant of one constraint while keeping its variable set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftInterventionSpec {
    pub target: String,
    pub form: ConstraintForm,
    #[serde(default)]
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default)]
    pub constant: Option<f64>,
}

/// A perfect intervention: pin each targeted variable to a value by
/// rewriting the paired constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectInterventionSpec {
    /// (constraint id, variable id, value) triples; constraints and
    /// variables must each be distinct, variables endogenous.
    pub pairs: Vec<(String, String, f64)>,
}

/// Either kind of intervention, as accepted by the verification pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterventionSpec {
    Soft(SoftInterventionSpec),
    Perfect(PerfectInterventionSpec),
}

/// Replace the targeted constraint's mechanism. The bipartite structure of
/// the system is invariant under this operation.
pub fn soft_intervene(
    system: &SystemOfConstraints,
    spec: &SoftInterventionSpec,
) -> Result<SystemOfConstraints> {
    let target = system
        .constraint(&spec.target)
        .ok_or_else(|| Error::UnknownConstraint(spec.target.clone()))?;
    for v in spec.coefficients.keys() {
        if !target.variables.contains(v) {
            return Err(Error::StructureChanged {
                target: spec.target.clone(),
                detail: format!("`{v}` is not among its variables"),
            });
        }
    }
    let mut out = system.clone();
    for c in &mut out.constraints {
        if c.id == spec.target {
            c.form = spec.form;
            c.coefficients = spec.coefficients.clone();
            c.constant = spec.constant;
        }
    }
    out.validate()?;
    Ok(out)
}

fn pinning_constraint(
    system: &SystemOfConstraints,
    constraint_id: &str,
    variable: &str,
    value: f64,
) -> Result<ConstraintDecl> {
    let decl = system
        .variable(variable)
        .ok_or_else(|| Error::UnknownVariable(variable.to_string()))?;
    // Stay inside the solvable class: pin in log space on positive domains.
    let (form, constant) = match decl.domain {
        Domain::Real => (ConstraintForm::Linear, -value),
        Domain::PositiveReal => {
            if value <= 0.0 {
                return Err(Error::NonpositiveLog {
                    variable: variable.to_string(),
                    value,
                });
            }
            (ConstraintForm::Loglinear, -value.ln())
        }
    };
    Ok(ConstraintDecl {
        id: constraint_id.to_string(),
        variables: [variable.to_string()].into(),
        form,
        coefficients: [(variable.to_string(), 1.0)].into(),
        constant: Some(constant),
    })
}

/// Perfect intervention on a system: each targeted constraint becomes the
/// pinning equation of its paired variable, and its edges shrink to that
/// single variable.
pub fn perfect_intervene(
    system: &SystemOfConstraints,
    spec: &PerfectInterventionSpec,
) -> Result<SystemOfConstraints> {
    let mut seen_constraints = BTreeSet::new();
    let mut seen_variables = BTreeSet::new();
    for (f, v, _) in &spec.pairs {
        if system.constraint(f).is_none() {
            return Err(Error::UnknownConstraint(f.clone()));
        }
        let decl = system
            .variable(v)
            .ok_or_else(|| Error::UnknownVariable(v.clone()))?;
        if decl.exogenous {
            return Err(Error::ExogenousTarget(v.clone()));
        }
        if !seen_constraints.insert(f.clone()) {
            return Err(Error::Validation(format!(
                "constraint `{f}` targeted twice"
            )));
        }
        if !seen_variables.insert(v.clone()) {
            return Err(Error::Validation(format!("variable `{v}` targeted twice")));
        }
    }
    let mut out = system.clone();
    for (f, v, value) in &spec.pairs {
        let replacement = pinning_constraint(system, f, v, *value)?;
        for c in &mut out.constraints {
            if &c.id == f {
                *c = replacement.clone();
            }
        }
    }
    out.validate()?;
    Ok(out)
}

/// Perfect intervention on a bipartite graph: each targeted constraint's
/// edges are replaced by the single edge to its paired variable.
pub fn intervene_graph(
    graph: &BipartiteGraph,
    targets_f: &[String],
    targets_v: &[String],
) -> Result<BipartiteGraph> {
    if targets_f.len() != targets_v.len() {
        return Err(Error::LengthMismatch {
            constraints: targets_f.len(),
            variables: targets_v.len(),
        });
    }
    for f in targets_f {
        if !graph.constraints().contains(f) {
            return Err(Error::UnknownConstraint(f.clone()));
        }
    }
    for v in targets_v {
        if !graph.variables().contains(v) {
            return Err(Error::UnknownVariable(v.clone()));
        }
        if graph.exogenous().contains(v) {
            return Err(Error::ExogenousTarget(v.clone()));
        }
    }
    let targeted: BTreeSet<&String> = targets_f.iter().collect();
    let mut edges: BTreeSet<(String, String)> = graph
        .edges()
        .iter()
        .filter(|(_, f)| !targeted.contains(f))
        .cloned()
        .collect();
    for (f, v) in targets_f.iter().zip(targets_v) {
        edges.insert((v.clone(), f.clone()));
    }
    BipartiteGraph::new(
        graph.variables().clone(),
        graph.constraints().clone(),
        edges,
        graph.exogenous().clone(),
    )
}

/// Perfect intervention directly on a causal ordering graph: the targeted
/// cluster splits into matched pairs and loses every incoming edge.
pub fn do_on_cluster_graph(
    ordering: &DirectedClusterGraph,
    targets_f: &[String],
    targets_v: &[String],
) -> Result<DirectedClusterGraph> {
    if targets_f.len() != targets_v.len() {
        return Err(Error::LengthMismatch {
            constraints: targets_f.len(),
            variables: targets_v.len(),
        });
    }
    let target_set: BTreeSet<String> = targets_f.iter().chain(targets_v).cloned().collect();
    if target_set.len() != targets_f.len() + targets_v.len() {
        return Err(Error::Validation(
            "intervention targets repeat a vertex".to_string(),
        ));
    }
    let cluster = ordering
        .find_cluster(&target_set)
        .ok_or_else(|| Error::NotACluster(format_ids(&target_set)))?
        .clone();
    let rep = cluster.iter().next().expect("cluster nonempty").clone();
    let clusters: Vec<BTreeSet<String>> = ordering
        .clusters()
        .filter(|c| **c != cluster)
        .cloned()
        .chain(
            targets_f
                .iter()
                .zip(targets_v)
                .map(|(f, v)| [f.clone(), v.clone()].into()),
        )
        .collect();
    let edges: Vec<(String, String)> = ordering
        .edges()
        .iter()
        .filter(|(_, target)| *target != rep)
        .cloned()
        .collect();
    DirectedClusterGraph::new(clusters, edges)
}

fn format_ids(ids: &BTreeSet<String>) -> String {
    ids.iter().cloned().collect::<Vec<_>>().join(", ")
}

/// Check that intervening on the bipartite graph and then ordering gives
/// the same graph as ordering first and intervening on the cluster graph.
/// True whenever the preconditions hold; exists as a regression surface.
pub fn check_commutation(
    graph: &BipartiteGraph,
    targets_f: &[String],
    targets_v: &[String],
) -> Result<bool> {
    let ordering = order_cd(graph);
    let on_graph = order_cd(&intervene_graph(graph, targets_f, targets_v)?);
    let on_ordering = do_on_cluster_graph(&ordering, targets_f, targets_v)?;
    Ok(on_graph == on_ordering)
}

/// Effects read off a causal ordering graph: variables that may change
/// generically, and variables that provably do not change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectPrediction {
    pub generic: BTreeSet<String>,
    pub none: BTreeSet<String>,
}

/// Variables of the complete and overcomplete parts, which is where the
/// effect theorems apply.
fn covered_variables(graph: &BipartiteGraph) -> BTreeSet<String> {
    let cd = coarse_decomposition(&graph.endogenous_subgraph());
    graph
        .endogenous()
        .into_iter()
        .filter(|v| !cd.incomplete.contains(v))
        .collect()
}

/// Effects of a soft intervention on constraint `f`: a variable may change
/// generically iff a directed path runs from `f` to it in the causal
/// ordering graph. Targets in the incomplete part are refused rather than
/// answered unsoundly.
pub fn predict_soft_effects(graph: &BipartiteGraph, f: &str) -> Result<EffectPrediction> {
    if !graph.constraints().contains(f) {
        return Err(Error::UnknownConstraint(f.to_string()));
    }
    let cd = coarse_decomposition(&graph.endogenous_subgraph());
    if cd.incomplete.contains(f) {
        return Err(Error::IncompleteTarget(f.to_string()));
    }
    let ordering = order_cd(graph);
    let mut generic = BTreeSet::new();
    let mut none = BTreeSet::new();
    for v in covered_variables(graph) {
        if ordering.has_directed_path(f, &v)? {
            generic.insert(v);
        } else {
            none.insert(v);
        }
    }
    Ok(EffectPrediction { generic, none })
}

/// Effects of a perfect intervention on a cluster (or a union of clusters):
/// a variable may change generically iff a directed path runs from some
/// targeted variable to it in the causal ordering graph.
pub fn predict_perfect_effects(
    graph: &BipartiteGraph,
    targets_f: &[String],
    targets_v: &[String],
) -> Result<EffectPrediction> {
    if targets_f.len() != targets_v.len() {
        return Err(Error::LengthMismatch {
            constraints: targets_f.len(),
            variables: targets_v.len(),
        });
    }
    let ordering = order_cd(graph);
    let cd = coarse_decomposition(&graph.endogenous_subgraph());
    let target_set: BTreeSet<String> = targets_f.iter().chain(targets_v).cloned().collect();
    for x in &target_set {
        if cd.incomplete.contains(x) {
            return Err(Error::IncompleteTarget(x.clone()));
        }
    }
    // The target must be a union of whole clusters, none touching the
    // exogenous singletons.
    let mut remaining = target_set.clone();
    while let Some(member) = remaining.iter().next().cloned() {
        let cluster = ordering
            .cluster_of(&member)
            .ok_or_else(|| Error::UnknownVertex(member.clone()))?;
        if cluster.iter().any(|x| graph.exogenous().contains(x)) {
            return Err(Error::ExogenousTarget(member.clone()));
        }
        if !cluster.iter().all(|x| remaining.contains(x)) {
            return Err(Error::NotACluster(format_ids(&target_set)));
        }
        for x in cluster {
            remaining.remove(x);
        }
    }
    let mut generic = BTreeSet::new();
    let mut none = BTreeSet::new();
    for v in covered_variables(graph) {
        let mut reached = false;
        for source in targets_v {
            if ordering.has_directed_path(source, &v)? {
                reached = true;
                break;
            }
        }
        if reached {
            generic.insert(v);
        } else {
            none.insert(v);
        }
    }
    Ok(EffectPrediction { generic, none })
}
