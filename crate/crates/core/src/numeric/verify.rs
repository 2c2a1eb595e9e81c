//! Statistical verification of the Markov predictions and coupled-draw
//! verification of intervention effect predictions.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interventions::{
    perfect_intervene, predict_perfect_effects, predict_soft_effects, soft_intervene,
    InterventionSpec,
};
use crate::markov::{marginalize, markov_ordering_restricted};
use crate::matching::{coarse_decomposition, perfect_matching};
use crate::ordering::orient;
use crate::separation::{d_separated, sigma_separated};
use crate::system::{bipartite_of, SystemOfConstraints};

use super::sampling::sample_with_plan;
use super::solver::{ClusterSolveReport, SolvePlan};
use super::stats::{fisher_z, ks_statistic, partial_correlation_with};

/// Predicted non-effect variables must match the unintervened solution to
/// this absolute tolerance under coupled exogenous draws.
pub const NON_EFFECT_TOLERANCE: f64 = 1e-8;

/// Largest endogenous query set for the exhaustive Markov enumeration.
pub const MAX_QUERY_VARIABLES: usize = 12;

/// Largest conditioning set enumerated per variable pair.
pub const MAX_CONDITIONING_SET: usize = 3;

/// One conditional-independence query and its test outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CiQueryResult {
    pub x: String,
    pub y: String,
    pub z: BTreeSet<String>,
    pub partial_corr: f64,
    pub z_stat: f64,
    pub p_value: f64,
    pub predicted_independent: bool,
}

/// Outcome of the Markov verification run.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovVerification {
    pub alpha: f64,
    pub n: usize,
    pub seed: u64,
    pub queries: Vec<CiQueryResult>,
    /// Rejections among queries predicted independent: must stay within the
    /// false-positive budget of the test level.
    pub independent_rejections: usize,
    pub independent_total: usize,
    /// Rejections among d-connected queries: reported for a view on
    /// empirical faithfulness, never asserted.
    pub dependent_rejections: usize,
    pub dependent_total: usize,
    /// Whether the sigma-separation cross-check on the matched directed
    /// graph ran (it needs a self-contained endogenous part).
    pub sigma_checked: bool,
    /// Queries sigma-separated in the matched directed graph but d-connected
    /// in the Markov ordering graph; provably zero. (The reverse happens:
    /// sigma-separation cannot see into feedback clusters, so it certifies a
    /// subset of the d-separations.)
    pub sigma_mismatches: usize,
}

/// Per-variable coupled-draw comparison for a predicted non-effect.
#[derive(Debug, Clone, Serialize)]
pub struct NonEffectCheck {
    pub variable: String,
    pub max_abs_diff: f64,
    pub within_tolerance: bool,
}

/// Distribution shift report for a predicted generic effect; informational.
#[derive(Debug, Clone, Serialize)]
pub struct GenericEffectCheck {
    pub variable: String,
    pub ks_statistic: f64,
}

/// Outcome of one intervention verification.
#[derive(Debug, Clone, Serialize)]
pub struct InterventionCheck {
    pub description: String,
    pub n: usize,
    pub seed: u64,
    pub non_effects: Vec<NonEffectCheck>,
    pub generic_effects: Vec<GenericEffectCheck>,
}

/// Combined report as emitted by the command line front end.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub markov: Vec<CiQueryResult>,
    pub interventions: Vec<InterventionCheck>,
    pub solvability: Vec<ClusterSolveReport>,
}

fn subsets_up_to(pool: &[String], cap: usize) -> Vec<BTreeSet<String>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 1..=cap.min(pool.len()) {
        let mut next = Vec::new();
        for indices in &frontier {
            let start = indices.last().map(|i| i + 1).unwrap_or(0);
            for index in start..pool.len() {
                let mut extended = indices.clone();
                extended.push(index);
                out.push(extended.iter().map(|i| pool[*i].clone()).collect());
                next.push(extended);
            }
        }
        frontier = next;
    }
    out
}

/// Enumerate every pair of covered endogenous variables with every
/// conditioning set of size at most three, test each query with a Fisher z
/// test on the sampled batch, and require the d-separated ones to pass.
/// Incomplete-part variables are excluded: the Markov property does not
/// cover them.
pub fn verify_markov(
    system: &SystemOfConstraints,
    alpha: f64,
    n: usize,
    seed: u64,
) -> Result<(MarkovVerification, Vec<ClusterSolveReport>)> {
    let plan = SolvePlan::new(system)?;
    let reports = plan.reports().to_vec();
    let graph = bipartite_of(system);
    let endogenous_subgraph = graph.endogenous_subgraph();
    let decomposition = coarse_decomposition(&endogenous_subgraph);
    let covered: Vec<String> = graph
        .endogenous()
        .into_iter()
        .filter(|v| !decomposition.incomplete.contains(v))
        .collect();
    if covered.len() > MAX_QUERY_VARIABLES {
        return Err(Error::SizeLimit {
            what: "endogenous query set",
            actual: covered.len(),
            limit: MAX_QUERY_VARIABLES,
        });
    }

    let markov_graph = markov_ordering_restricted(&graph);
    let sigma_graph = match perfect_matching(&endogenous_subgraph) {
        Ok(matching) => {
            let oriented = orient(&graph, &matching)?;
            Some(marginalize(&oriented, graph.constraints())?)
        }
        Err(_) => None,
    };

    let batch = sample_with_plan(system, &plan, n, seed)?;
    let log_space = plan.is_all_loglinear();

    let mut query_defs = Vec::new();
    for (i, x) in covered.iter().enumerate() {
        for y in covered.iter().skip(i + 1) {
            let pool: Vec<String> = covered
                .iter()
                .filter(|v| *v != x && *v != y)
                .cloned()
                .collect();
            for z in subsets_up_to(&pool, MAX_CONDITIONING_SET) {
                query_defs.push((x.clone(), y.clone(), z));
            }
        }
    }

    let mut sigma_mismatches = 0usize;
    let mut predictions = Vec::with_capacity(query_defs.len());
    for (x, y, z) in &query_defs {
        let xs: BTreeSet<String> = [x.clone()].into();
        let ys: BTreeSet<String> = [y.clone()].into();
        let predicted = d_separated(&markov_graph, &xs, &ys, z)?;
        if let Some(sigma) = &sigma_graph {
            if sigma_separated(sigma, &xs, &ys, z)? && !predicted {
                sigma_mismatches += 1;
            }
        }
        predictions.push(predicted);
    }

    let queries: Vec<CiQueryResult> = query_defs
        .par_iter()
        .zip(predictions.par_iter())
        .map(|((x, y, z), predicted)| {
            let r = if log_space {
                partial_correlation_with(&batch, x, y, z, f64::ln)?
            } else {
                partial_correlation_with(&batch, x, y, z, |v| v)?
            };
            let (z_stat, p_value) = fisher_z(r, batch.n, z.len());
            Ok(CiQueryResult {
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                partial_corr: r,
                z_stat,
                p_value,
                predicted_independent: *predicted,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let independent_total = queries.iter().filter(|q| q.predicted_independent).count();
    let independent_rejections = queries
        .iter()
        .filter(|q| q.predicted_independent && q.p_value < alpha)
        .count();
    let dependent_total = queries.len() - independent_total;
    let dependent_rejections = queries
        .iter()
        .filter(|q| !q.predicted_independent && q.p_value < alpha)
        .count();

    Ok((
        MarkovVerification {
            alpha,
            n,
            seed,
            queries,
            independent_rejections,
            independent_total,
            dependent_rejections,
            dependent_total,
            sigma_checked: sigma_graph.is_some(),
            sigma_mismatches,
        },
        reports,
    ))
}

fn describe(spec: &InterventionSpec) -> String {
    match spec {
        InterventionSpec::Soft(s) => format!("soft intervention on {}", s.target),
        InterventionSpec::Perfect(p) => {
            let pairs: Vec<String> = p
                .pairs
                .iter()
                .map(|(f, v, value)| format!("{f}:{v}={value}"))
                .collect();
            format!("do({})", pairs.join(", "))
        }
    }
}

/// Compare solutions before and after an intervention under coupled
/// exogenous draws (same seed). Predicted non-effects must agree pointwise
/// to [`NON_EFFECT_TOLERANCE`]; predicted generic effects are summarized by
/// their Kolmogorov-Smirnov shift, with no claim attached.
pub fn verify_intervention_effects(
    system: &SystemOfConstraints,
    spec: &InterventionSpec,
    n: usize,
    seed: u64,
) -> Result<InterventionCheck> {
    let graph = bipartite_of(system);
    let (prediction, intervened) = match spec {
        InterventionSpec::Soft(s) => (
            predict_soft_effects(&graph, &s.target)?,
            soft_intervene(system, s)?,
        ),
        InterventionSpec::Perfect(p) => {
            let targets_f: Vec<String> = p.pairs.iter().map(|(f, _, _)| f.clone()).collect();
            let targets_v: Vec<String> = p.pairs.iter().map(|(_, v, _)| v.clone()).collect();
            (
                predict_perfect_effects(&graph, &targets_f, &targets_v)?,
                perfect_intervene(system, p)?,
            )
        }
    };

    let base_plan = SolvePlan::new(system)?;
    let intervened_plan = SolvePlan::new(&intervened)?;
    let base = sample_with_plan(system, &base_plan, n, seed)?;
    let changed = sample_with_plan(&intervened, &intervened_plan, n, seed)?;

    let mut non_effects = Vec::new();
    for variable in &prediction.none {
        let a = base.column(variable)?;
        let b = changed.column(variable)?;
        let max_abs_diff = a
            .iter()
            .zip(b)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0f64, f64::max);
        non_effects.push(NonEffectCheck {
            variable: variable.clone(),
            max_abs_diff,
            within_tolerance: max_abs_diff < NON_EFFECT_TOLERANCE,
        });
    }
    let mut generic_effects = Vec::new();
    for variable in &prediction.generic {
        generic_effects.push(GenericEffectCheck {
            variable: variable.clone(),
            ks_statistic: ks_statistic(base.column(variable)?, changed.column(variable)?),
        });
    }
    Ok(InterventionCheck {
        description: describe(spec),
        n,
        seed,
        non_effects,
        generic_effects,
    })
}
