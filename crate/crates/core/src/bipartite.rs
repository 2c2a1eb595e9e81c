//! Undirected bipartite graphs with variable vertices, constraint vertices,
//! and a distinguished exogenous subset of the variable side.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bipartite graph `<V, F, E>` with an exogenous subset `W` of `V`.
/// All id sets are kept sorted so the edge set is canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    variables: BTreeSet<String>,
    constraints: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    exogenous: BTreeSet<String>,
}

impl BipartiteGraph {
    pub fn new(
        variables: BTreeSet<String>,
        constraints: BTreeSet<String>,
        edges: BTreeSet<(String, String)>,
        exogenous: BTreeSet<String>,
    ) -> Result<Self> {
        if let Some(shared) = variables.intersection(&constraints).next() {
            return Err(Error::Validation(format!(
                "`{shared}` is both a variable and a constraint vertex"
            )));
        }
        for (v, f) in &edges {
            if !variables.contains(v) {
                return Err(Error::UnknownVariable(v.clone()));
            }
            if !constraints.contains(f) {
                return Err(Error::UnknownConstraint(f.clone()));
            }
        }
        for w in &exogenous {
            if !variables.contains(w) {
                return Err(Error::UnknownVariable(w.clone()));
            }
        }
        Ok(Self {
            variables,
            constraints,
            edges,
            exogenous,
        })
    }

    /// Convenience constructor from string slices; edges are (variable,
    /// constraint) pairs.
    pub fn from_edges(
        variables: &[&str],
        constraints: &[&str],
        edges: &[(&str, &str)],
        exogenous: &[&str],
    ) -> Result<Self> {
        Self::new(
            variables.iter().map(|s| s.to_string()).collect(),
            constraints.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(v, f)| (v.to_string(), f.to_string()))
                .collect(),
            exogenous.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn variables(&self) -> &BTreeSet<String> {
        &self.variables
    }

    pub fn constraints(&self) -> &BTreeSet<String> {
        &self.constraints
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn exogenous(&self) -> &BTreeSet<String> {
        &self.exogenous
    }

    pub fn endogenous(&self) -> BTreeSet<String> {
        self.variables
            .difference(&self.exogenous)
            .cloned()
            .collect()
    }

    pub fn contains_vertex(&self, id: &str) -> bool {
        self.variables.contains(id) || self.constraints.contains(id)
    }

    pub fn is_null(&self) -> bool {
        self.variables.is_empty() && self.constraints.is_empty()
    }

    /// Adjacent variables of one constraint vertex.
    pub fn adjacency_of_constraint(&self, f: &str) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter(|(_, g)| g == f)
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// Adjacent constraints of one variable vertex.
    pub fn adjacency_of_variable(&self, v: &str) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter(|(u, _)| u == v)
            .map(|(_, f)| f.clone())
            .collect()
    }

    /// Adjacent variables of a set of constraint vertices.
    pub fn adjacency_of_constraints(&self, set: &BTreeSet<String>) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter(|(_, f)| set.contains(f))
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// Subgraph induced by `keep`, which must be a subset of the vertices.
    pub fn induced_subgraph(&self, keep: &BTreeSet<String>) -> Result<Self> {
        for id in keep {
            if !self.contains_vertex(id) {
                return Err(Error::UnknownVertex(id.clone()));
            }
        }
        let variables: BTreeSet<String> = self.variables.intersection(keep).cloned().collect();
        let constraints: BTreeSet<String> = self.constraints.intersection(keep).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(v, f)| keep.contains(v) && keep.contains(f))
            .cloned()
            .collect();
        let exogenous = self.exogenous.intersection(keep).cloned().collect();
        Ok(Self {
            variables,
            constraints,
            edges,
            exogenous,
        })
    }

    /// Subgraph induced by the endogenous variables and all constraints.
    pub fn endogenous_subgraph(&self) -> Self {
        let keep: BTreeSet<String> = self
            .endogenous()
            .into_iter()
            .chain(self.constraints.iter().cloned())
            .collect();
        self.induced_subgraph(&keep)
            .expect("own vertices are known")
    }

    /// Connected components of the underlying undirected graph; isolated
    /// vertices form singleton components.
    pub fn connected_components(&self) -> Vec<BTreeSet<String>> {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut components = Vec::new();
        let all: Vec<String> = self
            .variables
            .iter()
            .chain(self.constraints.iter())
            .cloned()
            .collect();
        for start in all {
            if seen.contains(&start) {
                continue;
            }
            let mut component = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                if !seen.insert(x.clone()) {
                    continue;
                }
                component.insert(x.clone());
                for (v, f) in &self.edges {
                    if v == &x && !seen.contains(f) {
                        stack.push(f.clone());
                    } else if f == &x && !seen.contains(v) {
                        stack.push(v.clone());
                    }
                }
            }
            components.push(component);
        }
        components
    }
}

/// Serialized form of a bipartite graph.
#[derive(Serialize, Deserialize)]
struct BipartiteJson {
    variables: Vec<String>,
    constraints: Vec<String>,
    edges: Vec<(String, String)>,
    exogenous: Vec<String>,
}

impl BipartiteGraph {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&BipartiteJson {
            variables: self.variables.iter().cloned().collect(),
            constraints: self.constraints.iter().cloned().collect(),
            edges: self.edges.iter().cloned().collect(),
            exogenous: self.exogenous.iter().cloned().collect(),
        })
        .expect("graph serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BipartiteJson = serde_json::from_str(text)?;
        Self::new(
            raw.variables.into_iter().collect(),
            raw.constraints.into_iter().collect(),
            raw.edges.into_iter().collect(),
            raw.exogenous.into_iter().collect(),
        )
    }
}
