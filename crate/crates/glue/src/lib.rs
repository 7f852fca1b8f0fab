//! Couples an unconstrained horizontal Brownian path with an
//! independent reflected vertical path into a single walk on the comb,
//! by trading time between the two clocks through their local times.
//!
//! The horizontal path spends its clock freely, but every unit of
//! local time it accrues on the junction lattice schedules a matching
//! amount of vertical clock, read off the inverse local time of the
//! reflected path. Inverting the combined clock splits real time into
//! the two components; the crate also extracts the traversal-time
//! statistics of the horizontal path between neighboring junctions.

mod excursion;
mod glue;
mod monotone;

pub use excursion::{excursion_durations, Excursions};
pub use glue::{
    glue_time_changes, junction_local_time, sample_glued_state, write_glued_path_csv,
    write_glued_path_csv_file, y_clock_from_definition, GluedPath, GluedState,
};
pub use monotone::{inverse_monotone, MonotoneFn};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GlueError {
    #[error(transparent)]
    Grid(#[from] comb_core::GridError),
    #[error(transparent)]
    LocalTime(#[from] comb_core::LocalTimeError),
    #[error(transparent)]
    Limit(#[from] comb_limit::LimitError),
    #[error("values must be nondecreasing, violated at index {index}")]
    NonMonotone { index: usize },
    #[error("times and values have lengths {times} and {values}")]
    LengthMismatch { times: usize, values: usize },
    #[error("times must be strictly increasing and finite, violated at index {index}")]
    BadTimes { index: usize },
    #[error("paths use different grids: dt {x_dt} vs {y_dt}, steps {x_steps} vs {y_steps}")]
    MismatchedGrids {
        x_dt: f64,
        y_dt: f64,
        x_steps: usize,
        y_steps: usize,
    },
    #[error("band {band} reaches halfway to the next junction at spacing {epsilon}; use a finer dt")]
    BandCoversJunctions { band: f64, epsilon: f64 },
    #[error("vertical path leaves [0, {h0}] with value {value}")]
    YPathOutOfRange { value: f64, h0: f64 },
    #[error("path contains a non-finite value")]
    NonFinitePath,
    #[error("junction spacing {epsilon} is not a positive finite number")]
    BadSpacing { epsilon: f64 },
    #[error("dt {dt} too coarse for junction spacing; need dt <= {required}")]
    ResolutionTooCoarse { dt: f64, required: f64 },
    #[error("only {found} completed traversals, need at least 10")]
    TooFewExcursions { found: usize },
}
