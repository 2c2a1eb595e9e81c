//! Conditional-independence statistics: sample partial correlation via the
//! precision matrix, the Fisher z transform, and the two-sample
//! Kolmogorov-Smirnov statistic.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::sampling::SampleBatch;

/// Sample partial correlation of `x` and `y` given `z`: both are
/// residualized against `[1, z...]` by least squares and the residuals are
/// correlated. Columns may be transformed by `transform` (identity or log)
/// before use.
///
/// A column that is an exact function of the conditioning set is
/// conditionally constant and therefore conditionally independent of
/// everything; such queries return 0. A column that is constant outright is
/// a degenerate-column error.
pub fn partial_correlation_with(
    batch: &SampleBatch,
    x: &str,
    y: &str,
    z: &BTreeSet<String>,
    transform: impl Fn(f64) -> f64,
) -> Result<f64> {
    let required = z.len() + 3;
    if batch.n <= required {
        return Err(Error::InsufficientSamples {
            required,
            actual: batch.n,
        });
    }
    let n = batch.n;
    let xs: Vec<f64> = batch.column(x)?.iter().map(|v| transform(*v)).collect();
    let ys: Vec<f64> = batch.column(y)?.iter().map(|v| transform(*v)).collect();
    let conditioners: Vec<Vec<f64>> = z
        .iter()
        .map(|name| {
            batch
                .column(name)
                .map(|c| c.iter().map(|v| transform(*v)).collect())
        })
        .collect::<Result<_>>()?;

    let centered_scale = |column: &[f64]| {
        let mean = column.iter().sum::<f64>() / n as f64;
        column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    };
    let scale_x = centered_scale(&xs);
    let scale_y = centered_scale(&ys);
    if scale_x <= 0.0 {
        return Err(Error::DegenerateColumn(x.to_string()));
    }
    if scale_y <= 0.0 {
        return Err(Error::DegenerateColumn(y.to_string()));
    }

    // Residualize against the design [1, z...] via the normal equations; a
    // pseudoinverse keeps collinear conditioning sets well-defined.
    let k = conditioners.len() + 1;
    let design_column = |j: usize, i: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            conditioners[j - 1][i]
        }
    };
    let mut gram = DMatrix::zeros(k, k);
    let mut gx = DMatrix::zeros(k, 1);
    let mut gy = DMatrix::zeros(k, 1);
    for a in 0..k {
        for b in a..k {
            let mut total = 0.0;
            for i in 0..n {
                total += design_column(a, i) * design_column(b, i);
            }
            gram[(a, b)] = total;
            gram[(b, a)] = total;
        }
        let mut total_x = 0.0;
        let mut total_y = 0.0;
        for i in 0..n {
            total_x += design_column(a, i) * xs[i];
            total_y += design_column(a, i) * ys[i];
        }
        gx[(a, 0)] = total_x;
        gy[(a, 0)] = total_y;
    }
    let inverse = gram
        .svd(true, true)
        .pseudo_inverse(1e-12)
        .expect("gram matrix decomposes");
    let beta_x = &inverse * &gx;
    let beta_y = &inverse * &gy;

    let mut cross = 0.0;
    let mut rss_x = 0.0;
    let mut rss_y = 0.0;
    for i in 0..n {
        let mut fit_x = 0.0;
        let mut fit_y = 0.0;
        for j in 0..k {
            fit_x += design_column(j, i) * beta_x[(j, 0)];
            fit_y += design_column(j, i) * beta_y[(j, 0)];
        }
        let rx = xs[i] - fit_x;
        let ry = ys[i] - fit_y;
        cross += rx * ry;
        rss_x += rx * rx;
        rss_y += ry * ry;
    }
    // Exactly determined by the conditioning set, up to rounding noise.
    if rss_x <= scale_x * 1e-16 || rss_y <= scale_y * 1e-16 {
        return Ok(0.0);
    }
    Ok((cross / (rss_x * rss_y).sqrt()).clamp(-1.0, 1.0))
}

/// Sample partial correlation on raw columns.
pub fn partial_correlation(
    batch: &SampleBatch,
    x: &str,
    y: &str,
    z: &BTreeSet<String>,
) -> Result<f64> {
    partial_correlation_with(batch, x, y, z, |v| v)
}

/// Fisher z statistic and two-sided p-value for a partial correlation with
/// `z_size` conditioning variables over `n` samples.
pub fn fisher_z(r: f64, n: usize, z_size: usize) -> (f64, f64) {
    let scale = ((n as f64) - (z_size as f64) - 3.0).sqrt();
    let statistic = r.atanh() * scale;
    if !statistic.is_finite() {
        return (statistic, 0.0);
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = 2.0 * (1.0 - normal.cdf(statistic.abs()));
    (statistic, p)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("finite samples"));
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let threshold = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= threshold {
            i += 1;
        }
        while j < ys.len() && ys[j] <= threshold {
            j += 1;
        }
        let fa = i as f64 / xs.len() as f64;
        let fb = j as f64 / ys.len() as f64;
        best = best.max((fa - fb).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::Rng;

    use super::super::sampling::substream;
    use super::*;

    fn batch_from(columns: BTreeMap<String, Vec<f64>>) -> SampleBatch {
        let n = columns.values().next().map(|c| c.len()).unwrap_or(0);
        SampleBatch {
            n,
            seed: 0,
            columns,
        }
    }

    #[test]
    fn identical_columns_have_correlation_one() {
        let column: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let batch = batch_from(
            [
                ("x".to_string(), column.clone()),
                ("y".to_string(), column),
            ]
            .into(),
        );
        let r = partial_correlation(&batch, "x", "y", &BTreeSet::new()).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn independent_columns_have_small_correlation() {
        let n = 100_000;
        let mut rng = substream(11, "stats-test");
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let batch = batch_from([("x".to_string(), x), ("y".to_string(), y)].into());
        let r = partial_correlation(&batch, "x", "y", &BTreeSet::new()).unwrap();
        assert!(r.abs() < 0.02, "r = {r}");
    }

    #[test]
    fn chain_is_conditionally_independent() {
        // u -> x -> y with unit coefficients: u and y decouple given x.
        let n = 100_000;
        let mut rng = substream(12, "stats-chain");
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let noise_x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let noise_y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let x: Vec<f64> = u.iter().zip(&noise_x).map(|(a, b)| a + b).collect();
        let y: Vec<f64> = x.iter().zip(&noise_y).map(|(a, b)| a + b).collect();
        let batch = batch_from(
            [
                ("u".to_string(), u),
                ("x".to_string(), x),
                ("y".to_string(), y),
            ]
            .into(),
        );
        let given: BTreeSet<String> = ["x".to_string()].into();
        let r = partial_correlation(&batch, "u", "y", &given).unwrap();
        assert!(r.abs() < 0.02, "r = {r}");
        let marginal = partial_correlation(&batch, "u", "y", &BTreeSet::new()).unwrap();
        assert!(marginal > 0.3, "marginal = {marginal}");
    }

    #[test]
    fn degenerate_column_is_an_error() {
        let batch = batch_from(
            [
                ("x".to_string(), vec![1.0; 50]),
                ("y".to_string(), (0..50).map(|i| i as f64).collect()),
            ]
            .into(),
        );
        assert!(matches!(
            partial_correlation(&batch, "x", "y", &BTreeSet::new()),
            Err(Error::DegenerateColumn(_))
        ));
    }

    #[test]
    fn insufficient_samples_is_an_error() {
        let batch = batch_from(
            [
                ("x".to_string(), vec![1.0, 2.0, 3.0]),
                ("y".to_string(), vec![1.0, 2.0, 3.0]),
            ]
            .into(),
        );
        assert!(matches!(
            partial_correlation(&batch, "x", "y", &BTreeSet::new()),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn fisher_z_scales_with_sample_size() {
        let (z1, p1) = fisher_z(0.01, 1_000, 0);
        let (z2, p2) = fisher_z(0.01, 100_000, 0);
        assert!(z2 > z1);
        assert!(p2 < p1);
        let (z3, p3) = fisher_z(1.0, 100, 0);
        assert!(z3.is_infinite());
        assert_eq!(p3, 0.0);
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0 + 0.5).collect();
        assert!(ks_statistic(&a, &a) < 1e-12);
        assert!(ks_statistic(&a, &b) > 0.4);
    }
}
