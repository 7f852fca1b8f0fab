//! Nondecreasing grid functions and their right-continuous inverses.

use comb_core::TimeGrid;

use crate::GlueError;

/// A nondecreasing function sampled on a strictly increasing time
/// grid. The inverse convention is `inf {s : f(s) > level}`, so flat
/// stretches resolve to their right endpoint and the inverse is right
/// continuous in the level.
#[derive(Debug, Clone)]
pub struct MonotoneFn {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneFn {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self, GlueError> {
        if times.len() != values.len() {
            return Err(GlueError::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(GlueError::LengthMismatch { times: 0, values: 0 });
        }
        for (i, w) in times.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(GlueError::BadTimes { index: i + 1 });
            }
        }
        if !times[0].is_finite() {
            return Err(GlueError::BadTimes { index: 0 });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GlueError::NonMonotone { index: i });
            }
            if i > 0 && values[i - 1] > *v {
                return Err(GlueError::NonMonotone { index: i });
            }
        }
        Ok(Self { times, values })
    }

    pub fn from_grid(grid: TimeGrid, values: Vec<f64>) -> Result<Self, GlueError> {
        Self::new(grid.times().collect(), values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty by construction")
    }

    /// Index form of the inverse: the first grid index whose value
    /// exceeds the level, with a flag saying the level was never
    /// exceeded (the index then points at the last grid entry).
    pub(crate) fn inverse_idx(&self, level: f64) -> (usize, bool) {
        let idx = self.values.partition_point(|v| *v <= level);
        if idx == self.values.len() {
            (idx - 1, true)
        } else {
            (idx, false)
        }
    }
}

/// Right-continuous inverse `inf {s : f(s) > level}` evaluated on the
/// grid. Levels at or beyond the final value return the grid end
/// together with a saturation flag.
pub fn inverse_monotone(f: &MonotoneFn, level: f64) -> (f64, bool) {
    let (idx, saturated) = f.inverse_idx(level);
    (f.times()[idx], saturated)
}
