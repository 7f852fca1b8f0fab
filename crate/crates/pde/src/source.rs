//! Forcing term for the boundary-trace equation.
//!
//! The auxiliary field `g` solves the plain heat equation
//! `d_t g = (1/2) d_y^2 g` in each column, with `g = 0` pinned at both
//! `y = 0` and `y = h0` and initial data `u0(x, y) - u0(x, 0)`. The
//! forcing handed to the trace equation is its boundary flux
//! `f(x, t) = d_y g(x, 0, t)`, taken with the second-order one-sided
//! difference `(4 g_1 - g_2) / (2 dy)`.
//!
//! `x` enters only through the initial data, so columns never couple;
//! the result is stored densely at every time level because the memory
//! quadrature downstream consumes all of them.

use crate::grid::{Field, Grid2D};
use crate::PdeError;
use comb_core::CombParams;

/// Dirichlet heat flow of `u0 - u0(.,0)`, returned as the boundary
/// flux `f(x, t)` at every time level `0..=nt`.
pub fn compute_source_g(
    u0: &Field,
    params: &CombParams,
    grid: &Grid2D,
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
    let (dt, dy) = (grid.dt(), grid.dy());
    let max_dt = 0.5 * dy * dy;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(PdeError::UnstableStep { dt, max_dt });
    }

    let r = 0.5 * dt / (dy * dy);
    let flux = |col: &[f64]| (4.0 * col[1] - col[2]) / (2.0 * dy);

    // One column buffer per x node, Dirichlet zeros kept in place.
    let mut g = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 1..ny - 1 {
            g[i * ny + j] = u0.at(0, i, j) - u0.at(0, i, 0);
        }
    }
    let mut next = g.clone();

    let mut out = Field::empty(grid.xs(), vec![0.0]);
    let mut level = vec![0.0; nx];
    for i in 0..nx {
        level[i] = flux(&g[i * ny..(i + 1) * ny]);
    }
    out.push_level(0.0, &level);

    for n in 1..=grid.nt() {
        for i in 0..nx {
            let col = &g[i * ny..(i + 1) * ny];
            let dest = &mut next[i * ny..(i + 1) * ny];
            for j in 1..ny - 1 {
                dest[j] = col[j] + r * (col[j + 1] - 2.0 * col[j] + col[j - 1]);
            }
            level[i] = flux(dest);
        }
        std::mem::swap(&mut g, &mut next);
        out.push_level(n as f64 * dt, &level);
    }
    Ok(out)
}
