use thiserror::Error;

/// Errors produced by graph construction, ordering, separation queries,
/// interventions, and numeric verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),

    #[error("size limit exceeded: {what} has {actual} elements, cap is {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("bipartite graph is not self-contained")]
    NotSelfContained,

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("matching is not perfect for the endogenous subgraph")]
    NotPerfectForEndogenous,

    #[error("seed vertex `{0}` is matched")]
    MatchedSeed(String),

    #[error("query sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("`{0}` is not a cluster of the causal ordering graph")]
    NotACluster(String),

    #[error("target `{0}` is exogenous")]
    ExogenousTarget(String),

    #[error("target `{0}` lies in the incomplete part; effect prediction is not sound there")]
    IncompleteTarget(String),

    #[error("interventions must pair equally many constraints and variables ({constraints} vs {variables})")]
    LengthMismatch {
        constraints: usize,
        variables: usize,
    },

    #[error("soft intervention on `{target}` must keep the variable set; {detail}")]
    StructureChanged { target: String, detail: String },

    #[error("constraint `{0}` is opaque; numeric work needs a linear or loglinear form")]
    OpaqueConstraint(String),

    #[error("cluster `{0}` mixes linear and loglinear constraints")]
    MixedForms(String),

    #[error("cluster `{cluster}` is not solvable (condition {condition:.3e})")]
    UnsolvableCluster { cluster: String, condition: f64 },

    #[error("cluster `{cluster}` is inconsistent (residual {residual:.3e})")]
    InconsistentCluster { cluster: String, residual: f64 },

    #[error("exogenous variable `{0}` has no distribution")]
    MissingDistribution(String),

    #[error("nonpositive value {value} for `{variable}` fed to a loglinear constraint")]
    NonpositiveLog { variable: String, value: f64 },

    #[error("column `{0}` is degenerate (zero variance)")]
    DegenerateColumn(String),

    #[error("need more than {required} samples, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
