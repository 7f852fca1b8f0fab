//! Summary statistics and the two-sample Kolmogorov-Smirnov test.

use crate::grid::SamplePath;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean, unbiased variance and the standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStat {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub n: usize,
}

impl SummaryStat {
    pub fn from_samples(samples: &[f64]) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::EmptySample);
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            samples.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Ok(SummaryStat {
            mean,
            variance,
            stderr: (variance / n as f64).sqrt(),
            n,
        })
    }
}

/// Mean squared displacement from the initial point at grid time `t`,
/// over a collection of paths sharing one grid.
pub fn msd(paths: &[SamplePath<f64>], t: f64) -> Result<SummaryStat, StatsError> {
    if paths.len() < 2 {
        return Err(StatsError::TooFewPaths(paths.len()));
    }
    let grid = paths[0].grid();
    if paths.iter().any(|p| p.grid() != grid) {
        return Err(StatsError::MismatchedGrids);
    }
    let idx = grid.index_of(t)?;
    let displacements: Vec<f64> = paths
        .iter()
        .map(|p| {
            let v = p.values();
            (v[idx] - v[0]).powi(2)
        })
        .collect();
    SummaryStat::from_samples(&displacements)
}

/// Result of the two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic two-sided p-value.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// The statistic is the exact sup distance between the empirical CDFs,
/// computed by a merge sweep that handles ties; the p-value uses the
/// asymptotic Kolmogorov distribution with the finite-sample size
/// correction `lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteSample);
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_unstable_by(|p, q| p.partial_cmp(q).expect("finite values compare"));
    xb.sort_unstable_by(|p, q| p.partial_cmp(q).expect("finite values compare"));

    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut statistic: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        // Advance past ties in lock step so the CDFs are compared only
        // after all samples at the current value are consumed.
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        let diff = (i as f64 / na - j as f64 / nb).abs();
        statistic = statistic.max(diff);
    }

    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_sf(lambda),
    })
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`.
fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need a nonempty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("mean squared displacement needs at least 2 paths, got {0}")]
    TooFewPaths(usize),
    #[error("paths do not share a common time grid")]
    MismatchedGrids,
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
}
