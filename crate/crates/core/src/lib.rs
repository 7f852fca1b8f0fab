//! Shared building blocks for the comb simulation toolkit.
//!
//! Everything in this crate is deliberately small and deterministic:
//! parameter bundles with validated invariants, a uniform time grid,
//! seedable counter-based RNG streams, band-based local time
//! estimation, and the summary statistics the simulators report.
//!
//! The heavier machinery (process simulators, PDE solvers) lives in the
//! sibling crates and builds on these types.

pub mod grid;
pub mod local_time;
pub mod manifest;
pub mod params;
pub mod rng;
pub mod stats;

pub use grid::{GridError, SamplePath, TimeGrid};
pub use local_time::{default_band, local_time_estimate, LocalTimeError};
pub use manifest::RunManifest;
pub use params::{CombParams, ParamError, ToothHeight};
pub use rng::{derive_stream, RngStream};
pub use stats::{ks_two_sample, msd, KsResult, StatsError, SummaryStat};
