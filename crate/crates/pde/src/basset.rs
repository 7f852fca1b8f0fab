//! Time stepper for the boundary-trace equation
//!
//! ```text
//! d_t v + (alpha/2) d_t^w v - (1/2) d_x^2 v = (alpha/2) f
//! ```
//!
//! where `d_t^w v(t) = int_0^t w(t - s) d_t v(s) ds` is the memory
//! derivative with kernel `w`. The memory term is discretized by
//! product integration: `d_t v` is frozen per step, and the kernel is
//! integrated exactly over each subinterval (the weights come
//! pretabulated in [`CaputoKernel`]), which absorbs the square-root
//! singularity of the infinite-tooth kernel on the first subinterval.
//! Horizontal diffusion is implicit, so no x-stability bound applies.
//!
//! [`BassetSolver`] exposes single stepping plus full state capture.
//! A solver resumed from [`BassetState`] carries the whole increment
//! history and continues exactly where the donor stopped, so split
//! runs reproduce direct runs.

use crate::grid::{Field, Grid2D};
use crate::kernel::CaputoKernel;
use crate::tri::Tridiag;
use crate::PdeError;
use comb_core::CombParams;

/// Complete stepping state: the current level, its values, and the
/// per-step increments that feed the memory term.
#[derive(Debug, Clone)]
pub struct BassetState {
    pub level: usize,
    pub v: Vec<f64>,
    pub increments: Vec<Vec<f64>>,
}

pub struct BassetSolver<'k> {
    kernel: &'k CaputoKernel,
    alpha: f64,
    dt: f64,
    nx: usize,
    level: usize,
    v: Vec<f64>,
    increments: Vec<Vec<f64>>,
    matrix: Tridiag,
    inertia: f64,
}

impl<'k> BassetSolver<'k> {
    pub fn new(
        v0: &[f64],
        params: &CombParams,
        kernel: &'k CaputoKernel,
        grid: &Grid2D,
    ) -> Result<Self, PdeError> {
        Self::build(v0.to_vec(), Vec::new(), 0, params, kernel, grid)
    }

    /// Rebuild a solver from captured state; stepping continues at
    /// `state.level` with the donor's memory intact.
    pub fn from_state(
        state: BassetState,
        params: &CombParams,
        kernel: &'k CaputoKernel,
        grid: &Grid2D,
    ) -> Result<Self, PdeError> {
        if state.increments.len() != state.level
            || state.increments.iter().any(|d| d.len() != state.v.len())
        {
            return Err(PdeError::InvalidGrid(
                "state increments do not match the recorded level",
            ));
        }
        Self::build(state.v, state.increments, state.level, params, kernel, grid)
    }

    fn build(
        v: Vec<f64>,
        increments: Vec<Vec<f64>>,
        level: usize,
        params: &CombParams,
        kernel: &'k CaputoKernel,
        grid: &Grid2D,
    ) -> Result<Self, PdeError> {
        let kh = kernel.h0().as_f64();
        let ph = params.h0().as_f64();
        if kh != ph {
            return Err(PdeError::KernelHeightMismatch {
                kernel: kh,
                params: ph,
            });
        }
        if (kernel.dt() - grid.dt()).abs() > 1e-12 * grid.dt() {
            return Err(PdeError::KernelGridMismatch {
                kernel_dt: kernel.dt(),
                kernel_len: kernel.len(),
                grid_dt: grid.dt(),
                grid_steps: grid.nt(),
            });
        }
        if v.len() != grid.nx() {
            return Err(PdeError::FieldShapeMismatch {
                nx: v.len(),
                ny: 1,
                grid_nx: grid.nx(),
                grid_ny: 1,
            });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(PdeError::NonFiniteField);
        }
        let alpha = params.alpha();
        let dt = grid.dt();
        let dx = grid.dx();
        let inertia = 1.0 + 0.5 * alpha * kernel.weight(0);
        let matrix = Tridiag::neumann_diffusion(grid.nx(), 0.5 * dt / (inertia * dx * dx));
        Ok(Self {
            kernel,
            alpha,
            dt,
            nx: grid.nx(),
            level,
            v,
            increments,
            matrix,
            inertia,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn time(&self) -> f64 {
        self.level as f64 * self.dt
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn into_state(self) -> BassetState {
        BassetState {
            level: self.level,
            v: self.v,
            increments: self.increments,
        }
    }

    /// Advance one step; `f_now` is the forcing at the new time level.
    pub fn step(&mut self, f_now: &[f64]) -> Result<(), PdeError> {
        let n = self.level + 1;
        if n > self.kernel.len() {
            return Err(PdeError::KernelGridMismatch {
                kernel_dt: self.kernel.dt(),
                kernel_len: self.kernel.len(),
                grid_dt: self.dt,
                grid_steps: n,
            });
        }
        if f_now.len() != self.nx {
            return Err(PdeError::FieldShapeMismatch {
                nx: f_now.len(),
                ny: 1,
                grid_nx: self.nx,
                grid_ny: 1,
            });
        }
        // Memory of past increments against the kernel cell integrals.
        let mut history = vec![0.0; self.nx];
        for (j, dv) in self.increments.iter().enumerate() {
            let weight = self.kernel.weight(n - 1 - j);
            for i in 0..self.nx {
                history[i] += weight * dv[i];
            }
        }
        let half_alpha = 0.5 * self.alpha;
        let mut rhs: Vec<f64> = (0..self.nx)
            .map(|i| {
                self.v[i]
                    + (self.dt * half_alpha * f_now[i] - half_alpha * history[i]) / self.inertia
            })
            .collect();
        self.matrix.solve(&mut rhs);
        let mut dv = rhs;
        for (delta, old) in dv.iter_mut().zip(self.v.iter_mut()) {
            let new = *delta;
            *delta = new - *old;
            *old = new;
        }
        self.increments.push(dv);
        self.level = n;
        Ok(())
    }
}

/// March the trace equation across the whole grid, storing every
/// `store_every`-th level plus the final one. `f` must hold the
/// forcing at every time level `0..=nt` on the same x nodes.
pub fn solve_basset(
    v0: &Field,
    f: &Field,
    params: &CombParams,
    kernel: &CaputoKernel,
    grid: &Grid2D,
    store_every: usize,
) -> Result<Field, PdeError> {
    if v0.ny() != 1 || v0.nx() != grid.nx() {
        return Err(PdeError::FieldShapeMismatch {
            nx: v0.nx(),
            ny: v0.ny(),
            grid_nx: grid.nx(),
            grid_ny: 1,
        });
    }
    if f.ny() != 1 || f.nx() != grid.nx() {
        return Err(PdeError::FieldShapeMismatch {
            nx: f.nx(),
            ny: f.ny(),
            grid_nx: grid.nx(),
            grid_ny: 1,
        });
    }
    if f.level_count() < grid.nt() + 1 {
        return Err(PdeError::ForcingNotDense {
            have: f.level_count(),
            need: grid.nt() + 1,
        });
    }
    if kernel.len() < grid.nt() {
        return Err(PdeError::KernelGridMismatch {
            kernel_dt: kernel.dt(),
            kernel_len: kernel.len(),
            grid_dt: grid.dt(),
            grid_steps: grid.nt(),
        });
    }

    let mut solver = BassetSolver::new(v0.level_values(0), params, kernel, grid)?;
    let stride = store_every.max(1);
    let mut out = Field::empty(grid.xs(), vec![0.0]);
    out.push_level(0.0, solver.v());
    for n in 1..=grid.nt() {
        solver.step(f.level_values(n))?;
        if n % stride == 0 || n == grid.nt() {
            out.push_level(solver.time(), solver.v());
        }
    }
    if !out
        .level_values(out.level_count() - 1)
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(PdeError::NonFiniteField);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use comb_core::ToothHeight;

    fn setup(nt: usize) -> (CombParams, CaputoKernel, Grid2D) {
        let params = CombParams::new(1.0, ToothHeight::Finite(1.0), 0.1).unwrap();
        let grid = Grid2D::new(-3.0, 3.0, 31, 1.0, 3, 0.01, nt).unwrap();
        let kernel = CaputoKernel::tabulate(ToothHeight::Finite(1.0), 64, 0.01, nt).unwrap();
        (params, kernel, grid)
    }

    #[test]
    fn constants_are_fixed_points_without_forcing() {
        let (params, kernel, grid) = setup(40);
        let v0 = Field::from_x_fn(&grid, |_| 2.5).unwrap();
        let zero = {
            let mut z = Field::empty(grid.xs(), vec![0.0]);
            for n in 0..=grid.nt() {
                z.push_level(n as f64 * grid.dt(), &vec![0.0; grid.nx()]);
            }
            z
        };
        let v = solve_basset(&v0, &zero, &params, &kernel, &grid, 10).unwrap();
        for l in 0..v.level_count() {
            for &x in v.level_values(l) {
                assert!((x - 2.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn split_run_resumed_from_state_matches_the_direct_run() {
        let (params, kernel, grid) = setup(60);
        let v0: Vec<f64> = grid.xs().iter().map(|x| (-x * x).exp()).collect();
        let f = vec![0.0; grid.nx()];

        let mut direct = BassetSolver::new(&v0, &params, &kernel, &grid).unwrap();
        for _ in 0..60 {
            direct.step(&f).unwrap();
        }

        let mut first = BassetSolver::new(&v0, &params, &kernel, &grid).unwrap();
        for _ in 0..30 {
            first.step(&f).unwrap();
        }
        let mut resumed = BassetSolver::from_state(first.into_state(), &params, &kernel, &grid)
            .unwrap();
        for _ in 0..30 {
            resumed.step(&f).unwrap();
        }

        assert_eq!(resumed.level(), direct.level());
        for i in 0..grid.nx() {
            assert_eq!(resumed.v()[i], direct.v()[i]);
        }
    }

    #[test]
    fn rejects_mismatched_kernels_and_short_forcing() {
        let (params, kernel, grid) = setup(40);
        let v0 = Field::from_x_fn(&grid, |_| 0.0).unwrap();

        let wrong_height = CaputoKernel::tabulate(ToothHeight::Finite(2.0), 64, 0.01, 40).unwrap();
        let dense = {
            let mut z = Field::empty(grid.xs(), vec![0.0]);
            for n in 0..=grid.nt() {
                z.push_level(n as f64 * grid.dt(), &vec![0.0; grid.nx()]);
            }
            z
        };
        assert!(matches!(
            solve_basset(&v0, &dense, &params, &wrong_height, &grid, 1),
            Err(PdeError::KernelHeightMismatch { .. })
        ));

        let wrong_dt = CaputoKernel::tabulate(ToothHeight::Finite(1.0), 64, 0.02, 40).unwrap();
        assert!(matches!(
            solve_basset(&v0, &dense, &params, &wrong_dt, &grid, 1),
            Err(PdeError::KernelGridMismatch { .. })
        ));

        let sparse = {
            let mut z = Field::empty(grid.xs(), vec![0.0]);
            z.push_level(0.0, &vec![0.0; grid.nx()]);
            z
        };
        assert!(matches!(
            solve_basset(&v0, &sparse, &params, &kernel, &grid, 1),
            Err(PdeError::ForcingNotDense { .. })
        ));
    }

    #[test]
    fn memory_term_slows_relaxation_against_plain_diffusion() {
        // With the kernel weights zeroed out the scheme is implicit
        // heat flow; the memory term must strictly slow the decay of a
        // bump's peak, and more strongly for larger alpha.
        let grid = Grid2D::new(-6.0, 6.0, 121, 1.0, 3, 0.005, 200).unwrap();
        let v0 = Field::from_x_fn(&grid, |x| (-x * x).exp()).unwrap();
        let dense = {
            let mut z = Field::empty(grid.xs(), vec![0.0]);
            for n in 0..=grid.nt() {
                z.push_level(n as f64 * grid.dt(), &vec![0.0; grid.nx()]);
            }
            z
        };
        let kernel = CaputoKernel::tabulate(ToothHeight::Finite(1.0), 64, 0.005, 200).unwrap();
        let peak = |alpha: f64| {
            let params = CombParams::new(alpha, ToothHeight::Finite(1.0), 0.1).unwrap();
            let v = solve_basset(&v0, &dense, &params, &kernel, &grid, 200).unwrap();
            let last = v.level_count() - 1;
            v.level_values(last)
                .iter()
                .fold(f64::MIN, |a, &b| a.max(b))
        };
        let slow = peak(4.0);
        let mid = peak(1.0);
        // alpha -> 0 recovers plain diffusion of the initial bump.
        let fast = peak(1e-9);
        assert!(fast < mid && mid < slow, "{fast} < {mid} < {slow} violated");
        assert!(slow < 1.0);
    }
}
