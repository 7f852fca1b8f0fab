use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use comb_core::{SamplePath, TimeGrid};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{DomainGeometry, Point2, DEFAULT_MAX_BOUNCE};
use crate::DomainError;

/// Per-path occupancy and health counters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DomainCounters {
    /// Steps whose pre-move position was in the spine strip (y < 0).
    pub spine_steps: u64,
    /// Steps whose pre-move position was in a tooth (y >= 0).
    pub tooth_steps: u64,
    /// Steps where the reflection chain hit the bounce budget.
    pub clamped_steps: u64,
}

impl DomainCounters {
    pub fn spine_fraction(&self) -> f64 {
        let total = self.spine_steps + self.tooth_steps;
        if total == 0 {
            return 0.0;
        }
        self.spine_steps as f64 / total as f64
    }
}

/// A stored reflected path together with its projection onto the
/// closed upper half plane, (x, max(y, 0)).
#[derive(Debug, Clone)]
pub struct DomainRun {
    pub path: SamplePath<Point2>,
    pub projected: SamplePath<Point2>,
    pub counters: DomainCounters,
}

impl DomainRun {
    pub fn grid(&self) -> TimeGrid {
        self.path.grid()
    }
}

pub fn project(p: Point2) -> Point2 {
    Point2::new(p.x, p.y.max(0.0))
}

fn check_setup(
    geom: &DomainGeometry,
    dt: f64,
    start: Point2,
) -> Result<(), DomainError> {
    if !geom.contains(start) {
        return Err(DomainError::StartOutside {
            x: start.x,
            y: start.y,
        });
    }
    let required = geom.max_dt();
    if dt > required {
        return Err(DomainError::ResolutionTooCoarse {
            dt,
            tooth_width: geom.tooth_width(),
            required,
        });
    }
    Ok(())
}

/// Euler scheme with unit diffusion and specular wall reflection,
/// storing every position.
pub fn simulate_domain(
    geom: &DomainGeometry,
    grid: TimeGrid,
    start: Point2,
    rng: &mut ChaCha8Rng,
) -> Result<DomainRun, DomainError> {
    check_setup(geom, grid.dt(), start)?;
    let sqrt_dt = grid.dt().sqrt();
    let mut points = Vec::with_capacity(grid.len());
    let mut counters = DomainCounters::default();
    let mut cur = start;
    points.push(cur);
    for _ in 0..grid.n_steps() {
        cur = advance(geom, cur, sqrt_dt, &mut counters, rng);
        points.push(cur);
    }
    let projected: Vec<Point2> = points.iter().map(|&p| project(p)).collect();
    Ok(DomainRun {
        path: SamplePath::new(grid, points)?,
        projected: SamplePath::new(grid, projected)?,
        counters,
    })
}

/// Same dynamics without storing the path; returns the final position
/// and the counters.
pub fn run_domain_walk(
    geom: &DomainGeometry,
    dt: f64,
    n_steps: usize,
    start: Point2,
    rng: &mut ChaCha8Rng,
) -> Result<(Point2, DomainCounters), DomainError> {
    TimeGrid::new(dt, n_steps)?;
    check_setup(geom, dt, start)?;
    let sqrt_dt = dt.sqrt();
    let mut counters = DomainCounters::default();
    let mut cur = start;
    for _ in 0..n_steps {
        cur = advance(geom, cur, sqrt_dt, &mut counters, rng);
    }
    Ok((cur, counters))
}

#[inline]
fn advance(
    geom: &DomainGeometry,
    cur: Point2,
    sqrt_dt: f64,
    counters: &mut DomainCounters,
    rng: &mut ChaCha8Rng,
) -> Point2 {
    if cur.y < 0.0 {
        counters.spine_steps += 1;
    } else {
        counters.tooth_steps += 1;
    }
    let gx: f64 = rng.sample(StandardNormal);
    let gy: f64 = rng.sample(StandardNormal);
    let proposed = Point2::new(cur.x + gx * sqrt_dt, cur.y + gy * sqrt_dt);
    let r = geom.reflect_step(cur, proposed, DEFAULT_MAX_BOUNCE);
    if r.clamped {
        counters.clamped_steps += 1;
    }
    r.point
}

/// CSV with raw and projected coordinates, at least 12 significant
/// digits per value.
pub fn write_domain_path_csv<W: Write>(out: &mut W, run: &DomainRun) -> io::Result<()> {
    writeln!(out, "t,x,y,x_proj,y_proj")?;
    let grid = run.grid();
    for (k, (p, pp)) in run
        .path
        .values()
        .iter()
        .zip(run.projected.values())
        .enumerate()
    {
        writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            grid.time_at(k),
            p.x,
            p.y,
            pp.x,
            pp.y
        )?;
    }
    Ok(())
}

pub fn write_domain_path_csv_file(file: &Path, run: &DomainRun) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(file)?);
    write_domain_path_csv(&mut out, run)
}
