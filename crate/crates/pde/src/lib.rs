//! Deterministic solvers for the boundary-coupled heat system that the
//! comb walks converge to, plus the memory-kernel boundary equation and
//! the periodic cell corrector.
//!
//! Three solvers share the grid types here:
//!
//! * [`solve_effective`] evolves `u(x, y, t)`: plain vertical diffusion
//!   in the interior, with all horizontal motion confined to a dynamic
//!   boundary row at `y = 0`.
//! * [`solve_basset`] evolves the boundary trace `v(x, t)` alone, paying
//!   for the eliminated interior with a memory term `d_t^w v` driven by
//!   the kernel in [`CaputoKernel`].
//! * [`solve_cell_problem`] solves the Poisson corrector on a truncated
//!   comb and reports its oscillation.

pub mod basset;
pub mod cell;
pub mod effective;
pub mod grid;
pub mod kernel;
pub mod source;
mod tri;

pub use basset::{solve_basset, BassetSolver, BassetState};
pub use cell::{solve_cell_problem, CellSolution};
pub use effective::{boundary_mass, solve_effective};
pub use grid::{
    probe_solution, truncation_half_width, write_field_csv, write_field_csv_file, Field, Grid2D,
};
pub use kernel::{
    kernel_laplace_check, kernel_w, write_kernel_csv, write_kernel_csv_file, CaputoKernel,
};
pub use source::compute_source_g;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("grid is malformed: {0}")]
    InvalidGrid(&'static str),
    #[error("time step {dt} is unstable for this mesh; use dt <= {max_dt}")]
    UnstableStep { dt: f64, max_dt: f64 },
    #[error("kernel time must be > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("kernel diverges pointwise at t = 0 for an infinite tooth")]
    KernelSingularAtZero,
    #[error("series truncation must keep at least one term")]
    EmptyTruncation,
    #[error("laplace variable must be finite and > 0, got {0}")]
    BadLaplaceVariable(f64),
    #[error("this solver needs a finite tooth height")]
    NeedsFiniteHeight,
    #[error("tooth height {params} from the parameters does not match the grid top {grid}")]
    HeightMismatch { grid: f64, params: f64 },
    #[error("field shape ({nx}, {ny}) does not match the grid ({grid_nx}, {grid_ny})")]
    FieldShapeMismatch {
        nx: usize,
        ny: usize,
        grid_nx: usize,
        grid_ny: usize,
    },
    #[error("kernel was tabulated for tooth height {kernel}, parameters say {params}")]
    KernelHeightMismatch { kernel: f64, params: f64 },
    #[error("kernel tabulation (dt = {kernel_dt}, {kernel_len} steps) does not cover the grid (dt = {grid_dt}, {grid_steps} steps)")]
    KernelGridMismatch {
        kernel_dt: f64,
        kernel_len: usize,
        grid_dt: f64,
        grid_steps: usize,
    },
    #[error("forcing must be stored at every time level (have {have}, need {need})")]
    ForcingNotDense { have: usize, need: usize },
    #[error("field values must be finite")]
    NonFiniteField,
    #[error("probe point ({x}, {y}) lies outside the grid hull")]
    OutsideHull { x: f64, y: f64 },
    #[error("time {0} is outside the stored range of the field")]
    OutsideTimeRange(f64),
    #[error("cell layout is malformed: {0}")]
    BadCellLayout(&'static str),
    #[error("linear solver stalled: relative residual {residual:e} above {tol:e}")]
    SolverStalled { residual: f64, tol: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
