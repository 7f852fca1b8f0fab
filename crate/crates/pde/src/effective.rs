//! Time stepper for the boundary-coupled heat system: vertical
//! diffusion `d_t u = (1/2) d_y^2 u` in the strip interior, a dynamic
//! boundary row `d_t u = (1/2)(alpha d_y u + d_x^2 u)` at `y = 0`, and
//! no-flux conditions at `y = h0` and at the truncated x-ends.
//!
//! The interior carries no horizontal coupling, so every column evolves
//! independently and explicitly; only the boundary row mixes columns,
//! and it does so implicitly to dodge the `dx^2` stiffness there. The
//! boundary flux uses the first-order one-sided difference
//! `(u_1 - u_0)/dy`: combined with a quadrature that gives the `y = 0`
//! node zero bulk weight, the semidiscrete balance
//!
//! ```text
//! d/dt [ u_0/alpha + dy (u_1 + ... + u_{J-1} + u_J/2) ] = 0
//! ```
//!
//! telescopes exactly, so mass drift is pure roundoff.

use crate::grid::{Field, Grid2D};
use crate::tri::Tridiag;
use crate::PdeError;
use comb_core::CombParams;

/// Evolve initial data through the coupled system, storing every
/// `store_every`-th level plus the final one.
pub fn solve_effective(
    params: &CombParams,
    u0: &Field,
    grid: &Grid2D,
    store_every: usize,
) -> Result<Field, PdeError> {
    let h = params.h0().value().ok_or(PdeError::NeedsFiniteHeight)?;
    if (h - grid.y_max()).abs() > 1e-12 * h.max(1.0) {
        return Err(PdeError::HeightMismatch {
            grid: grid.y_max(),
            params: h,
        });
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    if u0.nx() != nx || u0.ny() != ny {
        return Err(PdeError::FieldShapeMismatch {
            nx: u0.nx(),
            ny: u0.ny(),
            grid_nx: nx,
            grid_ny: ny,
        });
    }
    if !u0.level_values(0).iter().all(|v| v.is_finite()) {
        return Err(PdeError::NonFiniteField);
    }
    let (dt, dy, dx) = (grid.dt(), grid.dy(), grid.dx());
    let max_dt = 0.5 * dy * dy;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(PdeError::UnstableStep { dt, max_dt });
    }

    let alpha = params.alpha();
    let stride = store_every.max(1);
    let r = 0.5 * dt / (dy * dy);
    let flux = 0.5 * dt * alpha / dy;
    let mut boundary = Tridiag::neumann_diffusion(nx, 0.5 * dt / (dx * dx));

    let mut u = u0.level_values(0).to_vec();
    let mut next = vec![0.0; nx * ny];
    let mut row = vec![0.0; nx];

    let mut out = Field::empty(grid.xs(), grid.ys());
    out.push_level(0.0, &u);

    for n in 1..=grid.nt() {
        for i in 0..nx {
            let col = &u[i * ny..(i + 1) * ny];
            let dest = &mut next[i * ny..(i + 1) * ny];
            for j in 1..ny - 1 {
                dest[j] = col[j] + r * (col[j + 1] - 2.0 * col[j] + col[j - 1]);
            }
            dest[ny - 1] = col[ny - 1] + 2.0 * r * (col[ny - 2] - col[ny - 1]);
            row[i] = col[0] + flux * (col[1] - col[0]);
        }
        boundary.solve(&mut row);
        for i in 0..nx {
            next[i * ny] = row[i];
        }
        std::mem::swap(&mut u, &mut next);
        if n % stride == 0 || n == grid.nt() {
            out.push_level(n as f64 * dt, &u);
        }
    }
    if !out.level_values(out.level_count() - 1).iter().all(|v| v.is_finite()) {
        return Err(PdeError::NonFiniteField);
    }
    Ok(out)
}

/// The conserved column functional `u(x,0)/alpha + int_0^{h0} u dy`,
/// one value per x node, using the quadrature the stepper conserves
/// exactly: zero bulk weight at `y = 0` (that node's mass sits in the
/// boundary atom) and half weight at the top.
pub fn boundary_mass(field: &Field, level: usize, alpha: f64) -> Vec<f64> {
    let ny = field.ny();
    assert!(ny >= 3, "mass functional needs a strip field");
    let dy = field.ys()[1] - field.ys()[0];
    (0..field.nx())
        .map(|i| {
            let mut bulk = 0.5 * field.at(level, i, ny - 1);
            for j in 1..ny - 1 {
                bulk += field.at(level, i, j);
            }
            field.at(level, i, 0) / alpha + dy * bulk
        })
        .collect()
}
