//! Band-based local time estimation.
//!
//! The estimator for the local time of a path `v` at a level `a` is the
//! normalized occupation of a thin band just above the level:
//!
//! ```text
//! L_t = (1 / (2 band)) * integral_0^t 1{ a < v_s <= a + band } ds
//! ```
//!
//! discretized with left-endpoint Riemann sums. The lower inequality is
//! strict: time the path spends exactly at the level (a sticky point,
//! say) is not band occupation and carries no weight here.

use crate::grid::SamplePath;
use thiserror::Error;

/// Default band width for a step size `dt`, two typical step lengths.
pub fn default_band(dt: f64) -> f64 {
    2.0 * dt.sqrt()
}

/// Running local-time estimate of `path` at `level`.
///
/// Returns one value per grid point; entry `k` covers `[0, k * dt)`, so
/// the first entry is zero and the sequence is nondecreasing.
pub fn local_time_estimate(
    path: &SamplePath<f64>,
    level: f64,
    band: f64,
) -> Result<Vec<f64>, LocalTimeError> {
    if !band.is_finite() || band <= 0.0 {
        return Err(LocalTimeError::InvalidBand(band));
    }
    if !level.is_finite() {
        return Err(LocalTimeError::InvalidLevel(level));
    }
    let weight = path.grid().dt() / (2.0 * band);
    let values = path.values();
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(acc);
    for &v in &values[..values.len() - 1] {
        if v > level && v <= level + band {
            acc += weight;
        }
        out.push(acc);
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq)]
pub enum LocalTimeError {
    #[error("band width must be finite and > 0, got {0}")]
    InvalidBand(f64),
    #[error("level must be finite, got {0}")]
    InvalidLevel(f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    #[test]
    fn path_pinned_at_level_accumulates_nothing() {
        // Occupation of the exact level is excluded by the strict
        // lower inequality.
        let grid = TimeGrid::new(0.1, 10).unwrap();
        let path = SamplePath::new(grid, vec![0.0; 11]).unwrap();
        let lt = local_time_estimate(&path, 0.0, 0.5).unwrap();
        assert!(lt.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_in_band_step_weight() {
        let grid = TimeGrid::new(0.5, 2).unwrap();
        let path = SamplePath::new(grid, vec![0.25, 2.0, 2.0]).unwrap();
        let lt = local_time_estimate(&path, 0.0, 0.5).unwrap();
        // One in-band left endpoint: dt / (2 band) = 0.5 / 1.0.
        assert_eq!(lt, vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn rejects_bad_band() {
        let grid = TimeGrid::new(0.1, 2).unwrap();
        let path = SamplePath::new(grid, vec![0.0; 3]).unwrap();
        assert!(matches!(
            local_time_estimate(&path, 0.0, 0.0),
            Err(LocalTimeError::InvalidBand(_))
        ));
        assert!(local_time_estimate(&path, 0.0, -0.1).is_err());
    }
}
