//! Rectangular space-time grids and the sampled fields that live on
//! them.

use crate::PdeError;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// A uniform node-centered grid on `[x_min, x_max] x [0, y_max]` with
/// `nt` time steps of size `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    x_min: f64,
    x_max: f64,
    nx: usize,
    y_max: f64,
    ny: usize,
    dt: f64,
    nt: usize,
}

impl Grid2D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        y_max: f64,
        ny: usize,
        dt: f64,
        nt: usize,
    ) -> Result<Self, PdeError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
            return Err(PdeError::InvalidGrid("x range must be finite with x_min < x_max"));
        }
        if nx < 3 || ny < 3 {
            return Err(PdeError::InvalidGrid("need at least 3 nodes per direction"));
        }
        if !y_max.is_finite() || y_max <= 0.0 {
            return Err(PdeError::InvalidGrid("y_max must be finite and positive"));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(PdeError::InvalidGrid("dt must be finite and positive"));
        }
        if nt == 0 {
            return Err(PdeError::InvalidGrid("need at least one time step"));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            y_max,
            ny,
            dt,
            nt,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        self.y_max / (self.ny - 1) as f64
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.nt as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.nx).map(|i| self.x_min + i as f64 * dx).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        let dy = self.dy();
        (0..self.ny).map(|j| j as f64 * dy).collect()
    }
}

/// Half-width of an x-range wide enough that a unit diffusion started
/// anywhere near the origin never feels the truncation: the Gaussian
/// tail at `8 sqrt(t)` is below 1e-14.
pub fn truncation_half_width(t_max: f64) -> f64 {
    8.0 * t_max.sqrt()
}

/// Nodal values sampled at a set of stored time levels.
///
/// `ny == 1` marks a boundary-trace field (values along y = 0 only);
/// its CSV output drops the y column.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    times: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
}

impl Field {
    /// A single-level field at `t = 0` sampled from a closure.
    pub fn from_xy_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self, PdeError> {
        let xs = grid.xs();
        let ys = grid.ys();
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                values.push(f(x, y));
            }
        }
        let field = Self {
            times: vec![0.0],
            xs,
            ys,
            values,
        };
        field.check_finite()?;
        Ok(field)
    }

    /// A single-level boundary-trace field at `t = 0`.
    pub fn from_x_fn(grid: &Grid2D, f: impl Fn(f64) -> f64) -> Result<Self, PdeError> {
        let xs = grid.xs();
        let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let field = Self {
            times: vec![0.0],
            xs,
            ys: vec![0.0],
            values,
        };
        field.check_finite()?;
        Ok(field)
    }

    /// A boundary-trace field sampled densely at every time level
    /// `0, dt, ..., nt * dt`; the closure receives `(t, x)`. This is
    /// the shape the memory-term solver expects its forcing in.
    pub fn trace_from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self, PdeError> {
        let xs = grid.xs();
        let mut field = Self::empty(xs.clone(), vec![0.0]);
        let mut level = vec![0.0; xs.len()];
        for n in 0..=grid.nt() {
            let t = n as f64 * grid.dt();
            for (v, &x) in level.iter_mut().zip(&xs) {
                *v = f(t, x);
            }
            field.push_level(t, &level);
        }
        field.check_finite()?;
        Ok(field)
    }

    pub(crate) fn empty(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            times: Vec::new(),
            xs,
            ys,
            values: Vec::new(),
        }
    }

    pub(crate) fn push_level(&mut self, t: f64, level: &[f64]) {
        debug_assert_eq!(level.len(), self.xs.len() * self.ys.len());
        self.times.push(t);
        self.values.extend_from_slice(level);
    }

    fn check_finite(&self) -> Result<(), PdeError> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(PdeError::NonFiniteField)
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn level_count(&self) -> usize {
        self.times.len()
    }

    /// All nodal values at stored level `l`, x-major and y-fastest.
    pub fn level_values(&self, l: usize) -> &[f64] {
        let stride = self.nx() * self.ny();
        &self.values[l * stride..(l + 1) * stride]
    }

    pub fn at(&self, level: usize, i: usize, j: usize) -> f64 {
        let (nx, ny) = (self.nx(), self.ny());
        assert!(level < self.level_count() && i < nx && j < ny);
        self.values[(level * nx + i) * ny + j]
    }

    /// Index of the stored level closest to `t`.
    pub fn level_near(&self, t: f64) -> Result<usize, PdeError> {
        if self.times.is_empty() || !t.is_finite() {
            return Err(PdeError::OutsideTimeRange(t));
        }
        let span = self.times.last().unwrap() - self.times[0];
        let slack = 1e-9 * (1.0 + span.abs());
        if t < self.times[0] - slack || t > self.times.last().unwrap() + slack {
            return Err(PdeError::OutsideTimeRange(t));
        }
        let mut best = 0;
        let mut gap = f64::INFINITY;
        for (l, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < gap {
                gap = (s - t).abs();
                best = l;
            }
        }
        Ok(best)
    }
}

fn bracket(nodes: &[f64], p: f64) -> Option<(usize, f64)> {
    let n = nodes.len();
    let lo = nodes[0];
    let hi = nodes[n - 1];
    let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    if p < lo - slack || p > hi + slack {
        return None;
    }
    if n == 1 {
        return Some((0, 0.0));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut k = ((p - lo) / step).floor() as isize;
    k = k.clamp(0, n as isize - 2);
    let k = k as usize;
    let frac = ((p - nodes[k]) / step).clamp(0.0, 1.0);
    Some((k, frac))
}

/// Bilinear interpolation of a stored level at the probe points.
///
/// Boundary-trace fields (`ny == 1`) interpolate along x only; the y
/// coordinate of each probe must then sit on the trace itself.
pub fn probe_solution(
    field: &Field,
    level: usize,
    points: &[(f64, f64)],
) -> Result<Vec<f64>, PdeError> {
    assert!(level < field.level_count(), "no such stored level");
    let mut out = Vec::with_capacity(points.len());
    for &(x, y) in points {
        let (i, fx) = bracket(field.xs(), x).ok_or(PdeError::OutsideHull { x, y })?;
        if field.ny() == 1 {
            if (y - field.ys()[0]).abs() > 1e-9 {
                return Err(PdeError::OutsideHull { x, y });
            }
            let a = field.at(level, i, 0);
            let b = field.at(level, (i + 1).min(field.nx() - 1), 0);
            out.push(a + fx * (b - a));
            continue;
        }
        let (j, fy) = bracket(field.ys(), y).ok_or(PdeError::OutsideHull { x, y })?;
        let i1 = (i + 1).min(field.nx() - 1);
        let j1 = (j + 1).min(field.ny() - 1);
        let v00 = field.at(level, i, j);
        let v10 = field.at(level, i1, j);
        let v01 = field.at(level, i, j1);
        let v11 = field.at(level, i1, j1);
        let v0 = v00 + fx * (v10 - v00);
        let v1 = v01 + fx * (v11 - v01);
        out.push(v0 + fy * (v1 - v0));
    }
    Ok(out)
}

/// Write a field as CSV. Header `t,x,y,u`, or `t,x,u` for
/// boundary-trace fields.
pub fn write_field_csv<W: Write>(out: &mut W, field: &Field) -> io::Result<()> {
    let trace = field.ny() == 1;
    if trace {
        writeln!(out, "t,x,u")?;
    } else {
        writeln!(out, "t,x,y,u")?;
    }
    for (l, &t) in field.times().iter().enumerate() {
        for (i, &x) in field.xs().iter().enumerate() {
            for (j, &y) in field.ys().iter().enumerate() {
                if trace {
                    writeln!(out, "{:.12e},{:.12e},{:.12e}", t, x, field.at(l, i, j))?;
                } else {
                    writeln!(
                        out,
                        "{:.12e},{:.12e},{:.12e},{:.12e}",
                        t,
                        x,
                        y,
                        field.at(l, i, j)
                    )?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_field_csv_file(path: &Path, field: &Field) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_field_csv(&mut out, field)
}
