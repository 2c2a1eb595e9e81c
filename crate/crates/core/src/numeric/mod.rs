//! Numeric verification: cluster-by-cluster solving of linear and
//! loglinear systems along the causal ordering, deterministic sampling of
//! exogenous variables, conditional-independence statistics, and the
//! verification pipelines for Markov and intervention predictions.

mod sampling;
mod solver;
mod stats;
mod verify;

pub use sampling::{sample, sample_with_plan, substream, SampleBatch};
pub use solver::{
    check_solvability, solve, ClusterSolveReport, Solution, SolvePlan, RESIDUAL_TOLERANCE,
    SOLVABILITY_THRESHOLD,
};
pub use stats::{fisher_z, ks_statistic, partial_correlation};
pub use verify::{
    verify_intervention_effects, verify_markov, CiQueryResult, GenericEffectCheck,
    InterventionCheck, MarkovVerification, NonEffectCheck, VerifyReport, NON_EFFECT_TOLERANCE,
};
