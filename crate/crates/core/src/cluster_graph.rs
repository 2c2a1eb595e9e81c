//! Directed cluster graphs: a partition of vertices into clusters plus
//! edges from vertices to clusters, with an acyclic cluster quotient.
//!
//! Stored canonically: clusters are keyed by their lexicographically smallest
//! member and edges by (source vertex, target representative), so structural
//! equality of two cluster graphs is plain `==`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedClusterGraph {
    /// representative (smallest member) -> cluster
    clusters: BTreeMap<String, BTreeSet<String>>,
    /// (source vertex, representative of target cluster)
    edges: BTreeSet<(String, String)>,
    /// vertex -> representative of its cluster
    membership: BTreeMap<String, String>,
}

impl DirectedClusterGraph {
    /// Build from clusters and edges. Edge targets may name any member of the
    /// target cluster. Fails on empty or overlapping clusters, sources inside
    /// their target cluster, unknown vertices, or a cyclic cluster quotient.
    pub fn new(
        clusters: impl IntoIterator<Item = BTreeSet<String>>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut keyed: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut membership: BTreeMap<String, String> = BTreeMap::new();
        for cluster in clusters {
            let rep = cluster
                .iter()
                .next()
                .ok_or_else(|| Error::Validation("empty cluster".to_string()))?
                .clone();
            for member in &cluster {
                if membership.contains_key(member) {
                    return Err(Error::Validation(format!(
                        "vertex `{member}` appears in two clusters"
                    )));
                }
                membership.insert(member.clone(), rep.clone());
            }
            keyed.insert(rep, cluster);
        }
        let mut canonical_edges = BTreeSet::new();
        for (source, target_member) in edges {
            let target_rep = membership
                .get(&target_member)
                .ok_or_else(|| Error::UnknownVertex(target_member.clone()))?
                .clone();
            if !membership.contains_key(&source) {
                return Err(Error::UnknownVertex(source));
            }
            if membership[&source] == target_rep {
                return Err(Error::Validation(format!(
                    "edge source `{source}` lies inside its target cluster"
                )));
            }
            canonical_edges.insert((source, target_rep));
        }
        let graph = Self {
            clusters: keyed,
            edges: canonical_edges,
            membership,
        };
        if !graph.quotient_is_acyclic() {
            return Err(Error::Validation(
                "cluster quotient graph is cyclic".to_string(),
            ));
        }
        Ok(graph)
    }

    pub fn clusters(&self) -> impl Iterator<Item = &BTreeSet<String>> {
        self.clusters.values()
    }

    /// Edges as (source vertex, representative of target cluster).
    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = &String> {
        self.membership.keys()
    }

    pub fn contains(&self, vertex: &str) -> bool {
        self.membership.contains_key(vertex)
    }

    pub fn cluster_of(&self, vertex: &str) -> Option<&BTreeSet<String>> {
        self.membership.get(vertex).map(|rep| &self.clusters[rep])
    }

    pub fn representative_of(&self, vertex: &str) -> Option<&str> {
        self.membership.get(vertex).map(|r| r.as_str())
    }

    /// The cluster containing `id`, if `id` names a cluster member.
    pub fn find_cluster(&self, members: &BTreeSet<String>) -> Option<&BTreeSet<String>> {
        members
            .iter()
            .next()
            .and_then(|m| self.cluster_of(m))
            .filter(|c| *c == members)
    }

    /// Quotient adjacency: representative -> representatives reachable by one
    /// cluster edge.
    fn quotient_adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.clusters.keys().map(|r| (r.as_str(), BTreeSet::new())).collect();
        for (source, target) in &self.edges {
            let source_rep = self.membership[source].as_str();
            adj.get_mut(source_rep)
                .expect("source cluster exists")
                .insert(target.as_str());
        }
        adj
    }

    fn quotient_is_acyclic(&self) -> bool {
        let adj = self.quotient_adjacency();
        let mut indegree: BTreeMap<&str, usize> = adj.keys().map(|r| (*r, 0)).collect();
        for targets in adj.values() {
            for t in targets {
                *indegree.get_mut(t).expect("target cluster exists") += 1;
            }
        }
        let mut queue: VecDeque<&str> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(r, _)| *r)
            .collect();
        let mut removed = 0;
        while let Some(r) = queue.pop_front() {
            removed += 1;
            for t in &adj[r] {
                let d = indegree.get_mut(t).expect("target cluster exists");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(t);
                }
            }
        }
        removed == self.clusters.len()
    }

    /// Cluster representatives in a topological order of the quotient,
    /// deterministic by lexicographic tie-breaking.
    pub fn topological_representatives(&self) -> Vec<String> {
        let adj = self.quotient_adjacency();
        let mut indegree: BTreeMap<&str, usize> = adj.keys().map(|r| (*r, 0)).collect();
        for targets in adj.values() {
            for t in targets {
                *indegree.get_mut(t).expect("target cluster exists") += 1;
            }
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(r, _)| *r)
            .collect();
        let mut order = Vec::with_capacity(self.clusters.len());
        while let Some(&r) = ready.iter().next() {
            ready.remove(r);
            order.push(r.to_string());
            for t in &adj[r] {
                let d = indegree.get_mut(t).expect("target cluster exists");
                *d -= 1;
                if *d == 0 {
                    ready.insert(t);
                }
            }
        }
        order
    }

    /// True iff `cl(x) = cl(y)` or a chain of clusters linked by edges leads
    /// from the cluster of `x` to the cluster of `y`.
    pub fn has_directed_path(&self, x: &str, y: &str) -> Result<bool> {
        let start = self
            .membership
            .get(x)
            .ok_or_else(|| Error::UnknownVertex(x.to_string()))?;
        let goal = self
            .membership
            .get(y)
            .ok_or_else(|| Error::UnknownVertex(y.to_string()))?;
        if start == goal {
            return Ok(true);
        }
        let adj = self.quotient_adjacency();
        let mut seen: BTreeSet<&str> = [start.as_str()].into();
        let mut queue: VecDeque<&str> = [start.as_str()].into();
        while let Some(r) = queue.pop_front() {
            for t in &adj[r] {
                if *t == goal.as_str() {
                    return Ok(true);
                }
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        Ok(false)
    }
}

/// Serialized form: clusters in canonical order, edges as
/// (source, index into the cluster list).
#[derive(Serialize, Deserialize)]
struct ClusterJson {
    clusters: Vec<Vec<String>>,
    edges: Vec<(String, usize)>,
}

impl DirectedClusterGraph {
    pub fn to_json(&self) -> String {
        let reps: Vec<&String> = self.clusters.keys().collect();
        let index_of: BTreeMap<&str, usize> = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_str(), i))
            .collect();
        let mut out = serde_json::to_string_pretty(&ClusterJson {
            clusters: self
                .clusters
                .values()
                .map(|c| c.iter().cloned().collect())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(s, t)| (s.clone(), index_of[t.as_str()]))
                .collect(),
        })
        .expect("cluster graph serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ClusterJson = serde_json::from_str(text)?;
        let clusters: Vec<BTreeSet<String>> = raw
            .clusters
            .iter()
            .map(|c| c.iter().cloned().collect())
            .collect();
        let mut edges = Vec::new();
        for (source, index) in raw.edges {
            let target = clusters
                .get(index)
                .and_then(|c| c.iter().next())
                .ok_or_else(|| {
                    Error::Validation(format!("edge targets missing cluster index {index}"))
                })?;
            edges.push((source, target.clone()));
        }
        Self::new(clusters, edges)
    }
}

/// Helper for building cluster graphs in tests and fixtures.
pub fn cluster_graph(
    clusters: &[&[&str]],
    edges: &[(&str, &str)],
) -> Result<DirectedClusterGraph> {
    DirectedClusterGraph::new(
        clusters
            .iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect()),
        edges
            .iter()
            .map(|(s, t)| (s.to_string(), t.to_string())),
    )
}
