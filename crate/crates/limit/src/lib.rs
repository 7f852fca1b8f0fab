//! The limit diffusion on the comb: a horizontal Brownian motion that
//! runs only on boundary local time of a vertically reflected motion
//! that is sticky at 0.
//!
//! The construction follows the time-change recipe: simulate a doubly
//! reflected Brownian motion `Bbar` on `[0, h0]` with local time `Lbar`
//! at 0, invert `phi(s) = s + (2/alpha) Lbar_s` to get the time change
//! `T`, and set
//!
//! ```text
//! Y_t = Bbar(T_t),   L_t = Lbar(T_t),   X_t = Wbar((2/alpha) L_t)
//! ```
//!
//! with `Wbar` an independent Brownian motion. Small `alpha` means long
//! sticky pauses at the boundary; large `alpha` recovers the reflected
//! motion itself.

pub mod generator;
pub mod occupation;
pub mod process;
pub mod reflected;
pub mod time_change;

pub use generator::{generator_residual, TestFunction};
pub use occupation::{occupation_value, sample_occupation_time};
pub use process::{
    sample_limit_state, simulate_limit_process, validate_limit_path, write_limit_path_csv,
    LimitPath, LimitState,
};
pub use reflected::{simulate_reflected_bm, ReflectedPath};
pub use time_change::build_sticky_time_change;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("alpha must be finite and > 0 for the time change, got {0}")]
    InvalidAlpha(f64),
    #[error("start point ({x}, {y}) is outside the state space")]
    InvalidStart { x: f64, y: f64 },
    #[error("t must be finite and >= 0, got {0}")]
    InvalidTime(f64),
    #[error("local-time input must be nondecreasing and start at 0 (violated at index {0})")]
    NotMonotone(usize),
    #[error("unknown test function id {0:?}; expected one of \"constant\", \"quadratic\", \"trig_product\"")]
    UnknownTestFunction(String),
    #[error("test function {0:?} requires a finite tooth height")]
    NeedsFiniteHeight(&'static str),
    #[error("limit path invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Grid(#[from] comb_core::GridError),
    #[error(transparent)]
    LocalTime(#[from] comb_core::LocalTimeError),
}
