//! Cluster-by-cluster solving of (log-)linear systems along the causal
//! ordering.
//!
//! Each non-exogenous cluster of the causal ordering graph contributes a
//! constant coefficient matrix over its own variables; the right-hand side
//! plugs in exogenous values and the solutions of earlier clusters. Complete
//! and overcomplete clusters must be uniquely solvable (full column rank);
//! incomplete clusters only need to be satisfiable and receive flagged
//! minimum-norm pseudo-solutions.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cluster_graph::DirectedClusterGraph;
use crate::error::{Error, Result};
use crate::matching::coarse_decomposition;
use crate::ordering::order_cd;
use crate::system::{bipartite_of, ConstraintForm, Domain, SystemOfConstraints};

/// A cluster counts as solvable when the smallest singular value of its
/// submatrix exceeds this fraction of the largest.
pub const SOLVABILITY_THRESHOLD: f64 = 1e-9;

/// Absolute residual tolerance, in the native (linear or log) space.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Solvability report for one non-exogenous cluster.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterSolveReport {
    pub cluster: BTreeSet<String>,
    pub solvable: bool,
    /// Smallest-to-largest singular value ratio of the cluster submatrix.
    pub condition: f64,
}

/// Values for the endogenous variables plus the set of variables that only
/// received a minimum-norm pseudo-solution (incomplete clusters).
#[derive(Debug, Clone)]
pub struct Solution {
    pub values: BTreeMap<String, f64>,
    pub pseudo: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    Linear,
    Log,
}

struct ClusterPlan {
    label: String,
    variables: Vec<String>,
    /// Variable domains, for picking pseudo-values in unconstrained clusters.
    domains: Vec<Domain>,
    space: Space,
    incomplete: bool,
    matrix: DMatrix<f64>,
    pseudoinverse: DMatrix<f64>,
    condition: f64,
    solvable: bool,
    /// Per constraint row: (constant, plugged-in terms outside the cluster).
    rows: Vec<(f64, Vec<(String, f64)>)>,
}

/// Prefactored solving plan for one system. Building it validates that all
/// constraints are numeric and that no cluster mixes linear with loglinear.
pub struct SolvePlan {
    exogenous: BTreeSet<String>,
    clusters: Vec<ClusterPlan>,
    reports: Vec<ClusterSolveReport>,
    all_loglinear: bool,
}

impl SolvePlan {
    pub fn new(system: &SystemOfConstraints) -> Result<Self> {
        system.validate()?;
        let graph = bipartite_of(system);
        let ordering = order_cd(&graph);
        let incomplete_part = coarse_decomposition(&graph.endogenous_subgraph()).incomplete;
        Self::with_ordering(system, &ordering, &incomplete_part)
    }

    fn with_ordering(
        system: &SystemOfConstraints,
        ordering: &DirectedClusterGraph,
        incomplete_part: &BTreeSet<String>,
    ) -> Result<Self> {
        let exogenous = system.exogenous_ids();
        let mut clusters = Vec::new();
        let mut reports = Vec::new();
        for representative in ordering.topological_representatives() {
            let members = ordering
                .cluster_of(&representative)
                .expect("representative names a cluster")
                .clone();
            if members.iter().any(|x| exogenous.contains(x)) {
                continue; // exogenous singleton
            }
            let variables: Vec<String> = members
                .iter()
                .filter(|x| system.variable(x).is_some())
                .cloned()
                .collect();
            let constraints: Vec<String> = members
                .iter()
                .filter(|x| system.constraint(x).is_some())
                .cloned()
                .collect();
            let label = members.iter().cloned().collect::<Vec<_>>().join(", ");

            let mut space = None;
            for f in &constraints {
                let form = system.constraint(f).expect("declared").form;
                let this = match form {
                    ConstraintForm::Opaque => return Err(Error::OpaqueConstraint(f.clone())),
                    ConstraintForm::Linear => Space::Linear,
                    ConstraintForm::Loglinear => Space::Log,
                };
                match space {
                    None => space = Some(this),
                    Some(prior) if prior != this => {
                        return Err(Error::MixedForms(label.clone()))
                    }
                    Some(_) => {}
                }
            }
            let space = space.unwrap_or(Space::Linear);

            let mut matrix = DMatrix::zeros(constraints.len(), variables.len());
            let mut rows = Vec::new();
            for (i, f) in constraints.iter().enumerate() {
                let decl = system.constraint(f).expect("declared");
                let mut outside = Vec::new();
                for (u, coefficient) in &decl.coefficients {
                    if let Some(j) = variables.iter().position(|v| v == u) {
                        matrix[(i, j)] = *coefficient;
                    } else {
                        outside.push((u.clone(), *coefficient));
                    }
                }
                rows.push((decl.constant(), outside));
            }

            let (condition, pseudoinverse) = factorize(&matrix);
            let solvable = condition > SOLVABILITY_THRESHOLD;
            reports.push(ClusterSolveReport {
                cluster: members.clone(),
                solvable,
                condition,
            });
            clusters.push(ClusterPlan {
                label,
                domains: variables
                    .iter()
                    .map(|v| system.variable(v).expect("declared").domain)
                    .collect(),
                variables,
                space,
                incomplete: members.iter().all(|x| incomplete_part.contains(x)),
                matrix,
                pseudoinverse,
                condition,
                solvable,
                rows,
            });
        }
        let all_loglinear = !system.constraints.is_empty()
            && system
                .constraints
                .iter()
                .all(|c| c.form == ConstraintForm::Loglinear);
        Ok(Self {
            exogenous,
            clusters,
            reports,
            all_loglinear,
        })
    }

    pub fn reports(&self) -> &[ClusterSolveReport] {
        &self.reports
    }

    pub fn exogenous(&self) -> &BTreeSet<String> {
        &self.exogenous
    }

    /// Whether every constraint is loglinear; such systems are tested on
    /// log-transformed columns, where they are exactly linear.
    pub fn is_all_loglinear(&self) -> bool {
        self.all_loglinear
    }

    /// Solve one batch of exogenous values.
    pub fn solve_with(&self, exogenous_values: &BTreeMap<String, f64>) -> Result<Solution> {
        for w in &self.exogenous {
            if !exogenous_values.contains_key(w) {
                return Err(Error::Validation(format!(
                    "no value supplied for exogenous `{w}`"
                )));
            }
        }
        let mut values: BTreeMap<String, f64> = exogenous_values.clone();
        let mut pseudo = BTreeSet::new();
        for cluster in &self.clusters {
            if cluster.matrix.nrows() == 0 {
                // Unconstrained incomplete cluster: minimum-norm in the
                // relevant space, i.e. 0 for real domains and 1 for
                // positive ones.
                for (v, domain) in cluster.variables.iter().zip(&cluster.domains) {
                    values.insert(
                        v.clone(),
                        match domain {
                            Domain::Real => 0.0,
                            Domain::PositiveReal => 1.0,
                        },
                    );
                    pseudo.insert(v.clone());
                }
                continue;
            }
            if !cluster.solvable {
                return Err(Error::UnsolvableCluster {
                    cluster: cluster.label.clone(),
                    condition: cluster.condition,
                });
            }
            let mut rhs = DMatrix::zeros(cluster.matrix.nrows(), 1);
            for (i, (constant, outside)) in cluster.rows.iter().enumerate() {
                let mut total = -constant;
                for (u, coefficient) in outside {
                    let raw = values[u];
                    let plugged = match cluster.space {
                        Space::Linear => raw,
                        Space::Log => {
                            if raw <= 0.0 {
                                return Err(Error::NonpositiveLog {
                                    variable: u.clone(),
                                    value: raw,
                                });
                            }
                            raw.ln()
                        }
                    };
                    total -= coefficient * plugged;
                }
                rhs[(i, 0)] = total;
            }
            let x = &cluster.pseudoinverse * &rhs;
            let residual = (&cluster.matrix * &x - &rhs).amax();
            if residual > RESIDUAL_TOLERANCE {
                return Err(Error::InconsistentCluster {
                    cluster: cluster.label.clone(),
                    residual,
                });
            }
            for (j, v) in cluster.variables.iter().enumerate() {
                let value = match cluster.space {
                    Space::Linear => x[(j, 0)],
                    Space::Log => x[(j, 0)].exp(),
                };
                values.insert(v.clone(), value);
            }
            if cluster.incomplete {
                pseudo.extend(cluster.variables.iter().cloned());
            }
        }
        for w in &self.exogenous {
            values.remove(w);
        }
        Ok(Solution { values, pseudo })
    }
}

/// Condition number (smallest over largest singular value) and Moore-Penrose
/// pseudoinverse of a cluster submatrix. Degenerate shapes get condition 1:
/// consistency is then a pure residual question.
fn factorize(matrix: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return (1.0, DMatrix::zeros(matrix.ncols(), matrix.nrows()));
    }
    let svd = matrix.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    let condition = if largest == 0.0 {
        0.0
    } else {
        smallest / largest
    };
    let pseudoinverse = svd
        .pseudo_inverse(largest.max(1.0) * 1e-13)
        .expect("singular value decomposition succeeded");
    (condition, pseudoinverse)
}

/// One report per non-exogenous cluster of the causal ordering graph, in
/// topological order. Incomplete clusters are judged by mere solvability
/// (full row rank), all others by unique solvability (full column rank);
/// both reduce to the same singular-value ratio.
pub fn check_solvability(system: &SystemOfConstraints) -> Result<Vec<ClusterSolveReport>> {
    Ok(SolvePlan::new(system)?.reports().to_vec())
}

/// Solve the system for one assignment of exogenous values.
pub fn solve(
    system: &SystemOfConstraints,
    exogenous_values: &BTreeMap<String, f64>,
) -> Result<Solution> {
    SolvePlan::new(system)?.solve_with(exogenous_values)
}
