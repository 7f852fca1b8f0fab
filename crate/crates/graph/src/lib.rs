//! Nearest-neighbor random walk on the comb graph.
//!
//! The graph is the real line (the spine) with a vertical segment of
//! height `h0` (a tooth) attached at every multiple of `epsilon`. The
//! walk lives on a lattice of spacing `delta` and advances model time
//! by `delta^2` per step. At a junction the walk enters the tooth with
//! probability `alpha*epsilon / (2 + alpha*epsilon)` and moves left or
//! right along the spine with probability `1 / (2 + alpha*epsilon)`
//! each, which is the discrete form of the flux balance that couples
//! spine and tooth local times.
//!
//! All positions are tracked as lattice integers internally, so long
//! runs accumulate no floating-point drift.

mod state;
mod walk;

pub use state::{GraphState, WalkCounters};
pub use walk::{
    junction_up_probability, run_graph_walk, simulate_graph, simulate_graph_from,
    step_graph_walk, write_graph_path_csv, write_graph_path_csv_file, GraphRun,
};

use thiserror::Error;

/// Step budget for a single walk, verified before simulation starts.
pub const MAX_WALK_STEPS: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("lattice step {delta} does not divide the tooth spacing {epsilon}")]
    IncompatibleSpacing { delta: f64, epsilon: f64 },
    #[error("lattice step {delta} does not divide the tooth height {h0}")]
    IncompatibleHeight { delta: f64, h0: f64 },
    #[error("lattice step must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("spine position {x} is off the lattice of step {delta}")]
    OffLattice { x: f64, delta: f64 },
    #[error("tooth height {y} outside (0, {h0}] or off the lattice")]
    BadToothPosition { y: f64, h0: f64 },
    #[error("horizon {t_max} needs {steps} steps, over the budget {budget}")]
    StepBudget { t_max: f64, steps: u64, budget: u64 },
    #[error("simulation horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
}
