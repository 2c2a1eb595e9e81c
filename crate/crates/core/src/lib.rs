//! Causal ordering for systems of constraints.
//!
//! A system of constraints is a set of equations over endogenous and
//! exogenous variables together with its bipartite structure. This crate
//! derives the causal ordering graph (a directed cluster graph over variable
//! and constraint vertices) and the Markov ordering graph (a DAG over
//! variables) from that structure, answers d- and sigma-separation queries,
//! predicts the effects of soft and perfect interventions, and numerically
//! verifies the predicted conditional independences and intervention
//! non-effects on solvable linear and loglinear systems.
//!
//! All graph types store their contents in sorted collections, so every
//! derived object has one canonical form and structural equality is plain
//! `==`. Values are immutable after construction and every operation is a
//! pure function.

pub mod bipartite;
pub mod cluster_graph;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod interventions;
pub mod markov;
pub mod matching;
pub mod mixed_graph;
pub mod numeric;
pub mod ordering;
pub mod separation;
pub mod system;

pub use bipartite::BipartiteGraph;
pub use cluster_graph::DirectedClusterGraph;
pub use error::{Error, Result};
pub use matching::{CoarseDecomposition, Matching};
pub use mixed_graph::DirectedMixedGraph;
pub use system::{
    bipartite_of, load_system, ConstraintDecl, ConstraintForm, Domain, ExogenousDistribution,
    SystemOfConstraints, VariableDecl,
};
