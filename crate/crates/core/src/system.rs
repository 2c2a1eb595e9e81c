//! Declared systems of constraints: equations over endogenous and exogenous
//! variables, their validation, file loading, and the associated bipartite
//! graph.
//!
//! Structure is declared, not inferred: the variable set of a constraint is
//! authoritative for graph structure even when a numeric coefficient is zero
//! or absent, so structure survives cancellation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteGraph;
use crate::error::{Error, Result};

/// Domain of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Real,
    PositiveReal,
}

/// Distribution of an exogenous variable, used when numeric work is requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExogenousDistribution {
    Normal { mean: f64, sigma: f64 },
    Lognormal { mean: f64, sigma: f64 },
    UniformPositive { low: f64, high: f64 },
}

/// A declared variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub id: String,
    pub exogenous: bool,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<ExogenousDistribution>,
}

/// Functional form of a constraint.
///
/// `linear` means `sum coef_i * x_i + constant = 0`; `loglinear` means
/// `sum coef_i * log(x_i) + constant = 0`; `opaque` carries structure only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintForm {
    Opaque,
    Linear,
    Loglinear,
}

/// A declared constraint. `variables` is the authoritative structure; the
/// coefficients may omit variables that cancel numerically, never the
/// other way round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDecl {
    pub id: String,
    pub variables: BTreeSet<String>,
    pub form: ConstraintForm,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

impl ConstraintDecl {
    pub fn coefficient(&self, variable: &str) -> f64 {
        self.coefficients.get(variable).copied().unwrap_or(0.0)
    }

    pub fn constant(&self) -> f64 {
        self.constant.unwrap_or(0.0)
    }
}

/// A system of constraints: variables plus constraints over them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOfConstraints {
    pub variables: Vec<VariableDecl>,
    pub constraints: Vec<ConstraintDecl>,
}

impl SystemOfConstraints {
    /// Validate every declared invariant, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::Validation(
                "system declares no variables".to_string(),
            ));
        }
        let mut variable_ids = BTreeSet::new();
        for v in &self.variables {
            if v.id.is_empty() {
                return Err(Error::Validation("empty variable id".to_string()));
            }
            if !variable_ids.insert(v.id.clone()) {
                return Err(Error::Validation(format!("duplicate id `{}`", v.id)));
            }
            if let Some(dist) = &v.distribution {
                if !v.exogenous {
                    return Err(Error::Validation(format!(
                        "distribution on endogenous variable `{}`",
                        v.id
                    )));
                }
                match dist {
                    ExogenousDistribution::Normal { sigma, .. } => {
                        if *sigma <= 0.0 {
                            return Err(Error::Validation(format!(
                                "sigma must be positive on `{}`",
                                v.id
                            )));
                        }
                    }
                    ExogenousDistribution::Lognormal { sigma, .. } => {
                        if *sigma <= 0.0 {
                            return Err(Error::Validation(format!(
                                "sigma must be positive on `{}`",
                                v.id
                            )));
                        }
                        if v.domain != Domain::PositiveReal {
                            return Err(Error::Validation(format!(
                                "lognormal distribution on non-positive domain of `{}`",
                                v.id
                            )));
                        }
                    }
                    ExogenousDistribution::UniformPositive { low, high } => {
                        if low.partial_cmp(high) != Some(std::cmp::Ordering::Less) {
                            return Err(Error::Validation(format!(
                                "uniform-positive needs low < high on `{}`",
                                v.id
                            )));
                        }
                        if *low <= 0.0 {
                            return Err(Error::Validation(format!(
                                "uniform-positive needs low > 0 on `{}`",
                                v.id
                            )));
                        }
                        if v.domain != Domain::PositiveReal {
                            return Err(Error::Validation(format!(
                                "uniform-positive distribution on non-positive domain of `{}`",
                                v.id
                            )));
                        }
                    }
                }
            }
        }
        let domains: BTreeMap<&str, Domain> = self
            .variables
            .iter()
            .map(|v| (v.id.as_str(), v.domain))
            .collect();
        let mut constraint_ids = BTreeSet::new();
        for c in &self.constraints {
            if c.id.is_empty() {
                return Err(Error::Validation("empty constraint id".to_string()));
            }
            if variable_ids.contains(&c.id) || !constraint_ids.insert(c.id.clone()) {
                return Err(Error::Validation(format!("duplicate id `{}`", c.id)));
            }
            if c.variables.is_empty() {
                return Err(Error::Validation(format!(
                    "constraint `{}` references no variables",
                    c.id
                )));
            }
            for v in &c.variables {
                if !variable_ids.contains(v) {
                    return Err(Error::Validation(format!(
                        "constraint `{}` references undeclared variable `{}`",
                        c.id, v
                    )));
                }
            }
            for v in c.coefficients.keys() {
                if !c.variables.contains(v) {
                    return Err(Error::Validation(format!(
                        "constraint `{}` has a coefficient for `{}` outside its variable set",
                        c.id, v
                    )));
                }
            }
            match c.form {
                ConstraintForm::Opaque => {
                    if !c.coefficients.is_empty() || c.constant.is_some() {
                        return Err(Error::Validation(format!(
                            "opaque constraint `{}` carries numeric data",
                            c.id
                        )));
                    }
                }
                ConstraintForm::Loglinear => {
                    for v in &c.variables {
                        if domains[v.as_str()] != Domain::PositiveReal {
                            return Err(Error::Validation(format!(
                                "loglinear constraint `{}` references `{}` with non-positive domain",
                                c.id, v
                            )));
                        }
                    }
                }
                ConstraintForm::Linear => {}
            }
        }
        Ok(())
    }

    pub fn variable(&self, id: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn constraint(&self, id: &str) -> Option<&ConstraintDecl> {
        self.constraints.iter().find(|c| c.id == id)
    }

    pub fn exogenous_ids(&self) -> BTreeSet<String> {
        self.variables
            .iter()
            .filter(|v| v.exogenous)
            .map(|v| v.id.clone())
            .collect()
    }

    pub fn endogenous_ids(&self) -> BTreeSet<String> {
        self.variables
            .iter()
            .filter(|v| !v.exogenous)
            .map(|v| v.id.clone())
            .collect()
    }

    /// Variables incident to no constraint. Allowed, but worth a warning:
    /// they end up as isolated singleton clusters downstream.
    pub fn isolated_variables(&self) -> Vec<String> {
        let mut referenced = BTreeSet::new();
        for c in &self.constraints {
            referenced.extend(c.variables.iter().cloned());
        }
        self.variables
            .iter()
            .filter(|v| !referenced.contains(&v.id))
            .map(|v| v.id.clone())
            .collect()
    }
}

/// Load and validate a system from a JSON file.
pub fn load_system(path: impl AsRef<Path>) -> Result<SystemOfConstraints> {
    let text = std::fs::read_to_string(path)?;
    let system: SystemOfConstraints = serde_json::from_str(&text)?;
    system.validate()?;
    Ok(system)
}

/// Serialize a system to pretty JSON.
pub fn system_to_json(system: &SystemOfConstraints) -> String {
    let mut out = serde_json::to_string_pretty(system).expect("system serializes");
    out.push('\n');
    out
}

/// The bipartite graph associated with a system: variable vertices, one
/// constraint vertex per constraint, and an edge (v, f) for every v in the
/// declared variable set of f.
pub fn bipartite_of(system: &SystemOfConstraints) -> BipartiteGraph {
    let variables: BTreeSet<String> = system.variables.iter().map(|v| v.id.clone()).collect();
    let constraints: BTreeSet<String> = system.constraints.iter().map(|c| c.id.clone()).collect();
    let mut edges = BTreeSet::new();
    for c in &system.constraints {
        for v in &c.variables {
            edges.insert((v.clone(), c.id.clone()));
        }
    }
    BipartiteGraph::new(variables, constraints, edges, system.exogenous_ids())
        .expect("a valid system induces a valid bipartite graph")
}
