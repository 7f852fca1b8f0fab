//! Uniform time grids and the paths sampled on them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A uniform grid `0, dt, 2 dt, ..., n_steps * dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self, GridError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(GridError::InvalidDt(dt));
        }
        if n_steps == 0 {
            return Err(GridError::EmptyGrid);
        }
        Ok(TimeGrid { dt, n_steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        self.time_at(self.n_steps)
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time_at(k))
    }

    /// Index of a time that must lie on the grid (up to a relative
    /// rounding slack of 1e-9).
    pub fn index_of(&self, t: f64) -> Result<usize, GridError> {
        if !t.is_finite() || t < 0.0 {
            return Err(GridError::TimeOffGrid { t, dt: self.dt });
        }
        let k = (t / self.dt).round();
        let idx = k as usize;
        let tol = 1e-9 * self.dt.max(t.abs());
        if idx > self.n_steps || (k * self.dt - t).abs() > tol {
            return Err(GridError::TimeOffGrid { t, dt: self.dt });
        }
        Ok(idx)
    }
}

/// A path sampled at every grid time, one state per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<T = f64> {
    grid: TimeGrid,
    values: Vec<T>,
}

impl<T> SamplePath<T> {
    pub fn new(grid: TimeGrid, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(SamplePath { grid, values })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State at a grid time, for callers that think in `t` rather than
    /// indices.
    pub fn value_at(&self, t: f64) -> Result<&T, GridError> {
        Ok(&self.values[self.grid.index_of(t)?])
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("dt must be finite and > 0, got {0}")]
    InvalidDt(f64),
    #[error("a time grid needs at least one step")]
    EmptyGrid,
    #[error("path length {actual} does not match grid length {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("time {t} does not lie on the grid with dt = {dt}")]
    TimeOffGrid { t: f64, dt: f64 },
}
