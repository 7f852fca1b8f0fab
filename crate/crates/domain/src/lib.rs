//! Reflected Brownian motion in the fattened comb domain.
//!
//! The domain is a horizontal spine strip of height `spine_width`
//! below y = 0, with open rectangular teeth of width `tooth_width` and
//! height `h0` attached above every multiple of `epsilon`. The walls
//! are axis-aligned, so normal reflection is exact specular folding
//! across the violated segments, applied in path order.

mod geometry;
mod simulate;

pub use geometry::{DomainGeometry, Point2, Reflected, DEFAULT_MAX_BOUNCE};
pub use simulate::{
    run_domain_walk, simulate_domain, write_domain_path_csv, write_domain_path_csv_file,
    DomainCounters, DomainRun,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("teeth of width {tooth_width} overlap at spacing {epsilon}")]
    TeethOverlap { tooth_width: f64, epsilon: f64 },
    #[error("start ({x}, {y}) lies outside the domain")]
    StartOutside { x: f64, y: f64 },
    #[error(
        "time step {dt} cannot resolve teeth of width {tooth_width}; need dt <= {required}"
    )]
    ResolutionTooCoarse {
        dt: f64,
        tooth_width: f64,
        required: f64,
    },
    #[error(transparent)]
    Grid(#[from] comb_core::GridError),
}
