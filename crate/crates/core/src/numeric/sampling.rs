//! Deterministic sampling. Every exogenous variable draws from its own
//! counter-based substream keyed by (seed, variable id), so the batch is
//! reproducible and independent of sampling order and parallelism.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::system::{ExogenousDistribution, SystemOfConstraints};

use super::solver::SolvePlan;

/// Sampled columns for every variable of a system.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub n: usize,
    pub seed: u64,
    pub columns: BTreeMap<String, Vec<f64>>,
}

impl SampleBatch {
    pub fn column(&self, id: &str) -> Result<&[f64]> {
        self.columns
            .get(id)
            .map(|c| c.as_slice())
            .ok_or_else(|| Error::UnknownVariable(id.to_string()))
    }
}

/// A deterministic ChaCha substream derived from a seed and a label.
pub fn substream(seed: u64, label: &str) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(label.as_bytes());
    ChaCha12Rng::from_seed(hasher.finalize().into())
}

fn draw(distribution: &ExogenousDistribution, rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    match distribution {
        ExogenousDistribution::Normal { mean, sigma } => {
            let d = Normal::new(*mean, *sigma).expect("validated sigma");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        ExogenousDistribution::Lognormal { mean, sigma } => {
            let d = LogNormal::new(*mean, *sigma).expect("validated sigma");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        ExogenousDistribution::UniformPositive { low, high } => {
            let d = Uniform::new(*low, *high);
            (0..n).map(|_| rng.sample(d)).collect()
        }
    }
}

/// Sample `n` rows: exogenous draws from per-variable substreams, endogenous
/// columns by solving each row along the causal ordering.
pub fn sample(system: &SystemOfConstraints, n: usize, seed: u64) -> Result<SampleBatch> {
    let plan = SolvePlan::new(system)?;
    sample_with_plan(system, &plan, n, seed)
}

/// Sampling against a prebuilt plan, for callers that reuse it.
pub fn sample_with_plan(
    system: &SystemOfConstraints,
    plan: &SolvePlan,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for w in plan.exogenous() {
        let decl = system.variable(w).expect("exogenous id is declared");
        let distribution = decl
            .distribution
            .as_ref()
            .ok_or_else(|| Error::MissingDistribution(w.clone()))?;
        let mut rng = substream(seed, w);
        columns.insert(w.clone(), draw(distribution, &mut rng, n));
    }

    let exogenous_ids: Vec<&String> = plan.exogenous().iter().collect();
    let rows: Vec<BTreeMap<String, f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let exo: BTreeMap<String, f64> = exogenous_ids
                .iter()
                .map(|w| ((*w).clone(), columns[*w][i]))
                .collect();
            plan.solve_with(&exo).map(|s| s.values)
        })
        .collect::<Result<Vec<_>>>()?;

    for v in system.endogenous_ids() {
        let column = rows.iter().map(|r| r[&v]).collect();
        columns.insert(v, column);
    }
    Ok(SampleBatch { n, seed, columns })
}
