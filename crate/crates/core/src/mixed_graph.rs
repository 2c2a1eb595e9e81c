//! Directed mixed graphs: directed plus bidirected edges. Self-loops are
//! permitted on directed edges only.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedMixedGraph {
    vertices: BTreeSet<String>,
    directed: BTreeSet<(String, String)>,
    /// stored with endpoints sorted
    bidirected: BTreeSet<(String, String)>,
}

impl DirectedMixedGraph {
    pub fn new(
        vertices: BTreeSet<String>,
        directed: BTreeSet<(String, String)>,
        bidirected: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        for (a, b) in &directed {
            if !vertices.contains(a) {
                return Err(Error::UnknownVertex(a.clone()));
            }
            if !vertices.contains(b) {
                return Err(Error::UnknownVertex(b.clone()));
            }
        }
        let mut canonical_bidirected = BTreeSet::new();
        for (a, b) in bidirected {
            if !vertices.contains(&a) {
                return Err(Error::UnknownVertex(a));
            }
            if !vertices.contains(&b) {
                return Err(Error::UnknownVertex(b));
            }
            if a == b {
                return Err(Error::Validation(format!(
                    "bidirected self-loop at `{a}`"
                )));
            }
            canonical_bidirected.insert(if a < b { (a, b) } else { (b, a) });
        }
        Ok(Self {
            vertices,
            directed,
            bidirected: canonical_bidirected,
        })
    }

    pub fn from_edges(
        vertices: &[&str],
        directed: &[(&str, &str)],
        bidirected: &[(&str, &str)],
    ) -> Result<Self> {
        Self::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            directed
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            bidirected
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string())),
        )
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn directed(&self) -> &BTreeSet<(String, String)> {
        &self.directed
    }

    pub fn bidirected(&self) -> &BTreeSet<(String, String)> {
        &self.bidirected
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_directed_edge(&self, a: &str, b: &str) -> bool {
        self.directed.contains(&(a.to_string(), b.to_string()))
    }

    pub fn has_bidirected_edge(&self, a: &str, b: &str) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.bidirected
            .contains(&(key.0.to_string(), key.1.to_string()))
    }

    pub fn children(&self, v: &str) -> BTreeSet<String> {
        self.directed
            .iter()
            .filter(|(a, _)| a == v)
            .map(|(_, b)| b.clone())
            .collect()
    }

    pub fn parents(&self, v: &str) -> BTreeSet<String> {
        self.directed
            .iter()
            .filter(|(_, b)| b == v)
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Ancestors of `seeds` along directed edges, seeds included.
    pub fn ancestors_of_set(&self, seeds: &BTreeSet<String>) -> BTreeSet<String> {
        let mut reached = seeds.clone();
        let mut queue: VecDeque<String> = seeds.iter().cloned().collect();
        while let Some(v) = queue.pop_front() {
            for p in self.parents(&v) {
                if reached.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
        reached
    }

    /// Descendants of `seeds` along directed edges, seeds included.
    pub fn descendants_of_set(&self, seeds: &BTreeSet<String>) -> BTreeSet<String> {
        let mut reached = seeds.clone();
        let mut queue: VecDeque<String> = seeds.iter().cloned().collect();
        while let Some(v) = queue.pop_front() {
            for c in self.children(&v) {
                if reached.insert(c.clone()) {
                    queue.push_back(c);
                }
            }
        }
        reached
    }

    /// Strongly connected components of the directed part (bidirected edges
    /// play no role), as canonical sorted sets.
    pub fn strongly_connected_components(&self) -> Vec<BTreeSet<String>> {
        let order: Vec<&String> = self.vertices.iter().collect();
        let index_of: BTreeMap<&str, usize> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut adjacency = vec![Vec::new(); order.len()];
        for (a, b) in &self.directed {
            if a != b {
                adjacency[index_of[a.as_str()]].push(index_of[b.as_str()]);
            }
        }

        struct Tarjan<'a> {
            adjacency: &'a [Vec<usize>],
            counter: usize,
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            stack: Vec<usize>,
            on_stack: Vec<bool>,
            components: Vec<Vec<usize>>,
        }
        impl Tarjan<'_> {
            fn visit(&mut self, v: usize) {
                self.index[v] = Some(self.counter);
                self.low[v] = self.counter;
                self.counter += 1;
                self.stack.push(v);
                self.on_stack[v] = true;
                for i in 0..self.adjacency[v].len() {
                    let w = self.adjacency[v][i];
                    if self.index[w].is_none() {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    } else if self.on_stack[w] {
                        self.low[v] = self.low[v].min(self.index[w].expect("visited"));
                    }
                }
                if self.low[v] == self.index[v].expect("visited") {
                    let mut component = Vec::new();
                    loop {
                        let w = self.stack.pop().expect("stack nonempty");
                        self.on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    self.components.push(component);
                }
            }
        }

        let mut state = Tarjan {
            adjacency: &adjacency,
            counter: 0,
            index: vec![None; order.len()],
            low: vec![0; order.len()],
            stack: Vec::new(),
            on_stack: vec![false; order.len()],
            components: Vec::new(),
        };
        for v in 0..order.len() {
            if state.index[v].is_none() {
                state.visit(v);
            }
        }
        let mut components: Vec<BTreeSet<String>> = state
            .components
            .into_iter()
            .map(|c| c.into_iter().map(|i| order[i].clone()).collect())
            .collect();
        components.sort();
        components
    }

    /// Map from vertex to the sorted set forming its strongly connected
    /// component.
    pub fn scc_membership(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut membership = BTreeMap::new();
        for component in self.strongly_connected_components() {
            for v in &component {
                membership.insert(v.clone(), component.clone());
            }
        }
        membership
    }

    /// Subgraph induced on `keep`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<String>) -> Result<Self> {
        for v in keep {
            if !self.vertices.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        Ok(Self {
            vertices: keep.clone(),
            directed: self
                .directed
                .iter()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .cloned()
                .collect(),
            bidirected: self
                .bidirected
                .iter()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .cloned()
                .collect(),
        })
    }

    pub fn is_acyclic(&self) -> bool {
        self.directed.iter().all(|(a, b)| a != b)
            && self
                .strongly_connected_components()
                .iter()
                .all(|c| c.len() == 1)
    }
}

/// Serialized form of a directed mixed graph.
#[derive(Serialize, Deserialize)]
struct MixedJson {
    vertices: Vec<String>,
    directed: Vec<(String, String)>,
    #[serde(default)]
    bidirected: Vec<(String, String)>,
}

impl DirectedMixedGraph {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&MixedJson {
            vertices: self.vertices.iter().cloned().collect(),
            directed: self.directed.iter().cloned().collect(),
            bidirected: self.bidirected.iter().cloned().collect(),
        })
        .expect("graph serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MixedJson = serde_json::from_str(text)?;
        Self::new(
            raw.vertices.into_iter().collect(),
            raw.directed.into_iter().collect(),
            raw.bidirected,
        )
    }
}
