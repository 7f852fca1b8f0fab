//! The time-change coupling of a free horizontal path and a reflected
//! vertical path into one walk on the comb.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use comb_core::{default_band, local_time_estimate, SamplePath, TimeGrid};
use comb_core::CombParams;
use comb_limit::simulate_reflected_bm;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::monotone::MonotoneFn;
use crate::GlueError;

/// One grid-aligned realization of the coupled walk.
///
/// `psi_x` and `psi_y` are the amounts of horizontal and vertical
/// clock consumed by each output time; they are grid multiples, they
/// are nondecreasing, and they sum to the output time exactly. `lx`
/// and `ly` are the junction local time of the horizontal path and the
/// floor local time of the vertical path, each read at the consumed
/// clock value. The vertical coordinate of `z` reads exactly 0 on
/// steps where the horizontal clock spends, and the stored value of
/// the vertical path otherwise.
#[derive(Debug, Clone)]
pub struct GluedPath {
    z: SamplePath<[f64; 2]>,
    psi_x: Vec<f64>,
    psi_y: Vec<f64>,
    lx: Vec<f64>,
    ly: Vec<f64>,
}

impl GluedPath {
    pub fn grid(&self) -> TimeGrid {
        self.z.grid()
    }

    pub fn z(&self) -> &SamplePath<[f64; 2]> {
        &self.z
    }

    pub fn psi_x(&self) -> &[f64] {
        &self.psi_x
    }

    pub fn psi_y(&self) -> &[f64] {
        &self.psi_y
    }

    pub fn lx(&self) -> &[f64] {
        &self.lx
    }

    pub fn ly(&self) -> &[f64] {
        &self.ly
    }
}

/// Final state of a coupled walk, for Monte Carlo batteries.
#[derive(Debug, Clone, Copy)]
pub struct GluedState {
    pub x: f64,
    pub y: f64,
    pub lx: f64,
    pub ly: f64,
}

/// Cumulative band local time of a path on the whole junction lattice,
/// one entry per grid point. Each junction carries the two one-sided
/// bands of the shared rule; they stay disjoint because the band is
/// required to be shorter than half the spacing, so a single pass over
/// the nearest junction equals the per-junction sum.
pub fn junction_local_time(
    path: &SamplePath<f64>,
    epsilon: f64,
    band: f64,
) -> Result<Vec<f64>, GlueError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(GlueError::BadSpacing { epsilon });
    }
    if !(band > 0.0) || band >= epsilon / 2.0 {
        return Err(GlueError::BandCoversJunctions { band, epsilon });
    }
    let dt = path.grid().dt();
    let weight = dt / (2.0 * band);
    let mut out = Vec::with_capacity(path.grid().len());
    let mut acc = 0.0;
    out.push(0.0);
    for &v in &path.values()[..path.grid().n_steps()] {
        let d = v - (v / epsilon).round() * epsilon;
        if d != 0.0 && d.abs() <= band {
            acc += weight;
        }
        out.push(acc);
    }
    Ok(out)
}

fn check_pair(
    xbar: &SamplePath<f64>,
    ybar: &SamplePath<f64>,
    params: &CombParams,
) -> Result<f64, GlueError> {
    let xg = xbar.grid();
    let yg = ybar.grid();
    if xg.dt() != yg.dt() || xg.n_steps() != yg.n_steps() {
        return Err(GlueError::MismatchedGrids {
            x_dt: xg.dt(),
            y_dt: yg.dt(),
            x_steps: xg.n_steps(),
            y_steps: yg.n_steps(),
        });
    }
    if xbar.values().iter().any(|v| !v.is_finite()) {
        return Err(GlueError::NonFinitePath);
    }
    let h0 = params.h0().as_f64();
    for &v in ybar.values() {
        if !v.is_finite() || v < 0.0 || v > h0 {
            return Err(GlueError::YPathOutOfRange { value: v, h0 });
        }
    }
    let band = default_band(xg.dt());
    if band >= params.epsilon() / 2.0 {
        return Err(GlueError::BandCoversJunctions {
            band,
            epsilon: params.epsilon(),
        });
    }
    Ok(band)
}

/// Walk the inverse of a clock function along the output grid.
///
/// `clock[i]` must be strictly increasing with increments of at least
/// dt, which makes the inverse advance by zero or one grid index per
/// output step. The rule below encodes that directly: stay if the
/// current clock value already exceeds the next output time, otherwise
/// take exactly one step.
fn invert_clock(clock: &[f64], times: &[f64]) -> Vec<usize> {
    let n = times.len();
    let mut idx = Vec::with_capacity(n);
    let mut i = 0usize;
    debug_assert!(clock[0] > times[0]);
    idx.push(0);
    for j in 1..n {
        if clock[i] <= times[j] && i + 1 < n {
            i += 1;
        }
        debug_assert!(i <= j);
        idx.push(i);
    }
    idx
}

/// Couple the two paths through their local times.
///
/// The junction local time of `xbar` is converted at rate
/// alpha epsilon / 2 into a floor local-time budget for `ybar`; the
/// inverse floor local time turns that budget into vertical clock, and
/// inverting the combined clock splits each output time between the
/// two paths. Exactly one clock advances per output step, so the
/// coordinates freeze complementarily and their joint quadratic
/// variation vanishes identically.
pub fn glue_time_changes(
    xbar: &SamplePath<f64>,
    ybar: &SamplePath<f64>,
    params: &CombParams,
) -> Result<GluedPath, GlueError> {
    let band = check_pair(xbar, ybar, params)?;
    let grid = xbar.grid();
    let times: Vec<f64> = grid.times().collect();
    let lx_bar = junction_local_time(xbar, params.epsilon(), band)?;
    let ly_bar = local_time_estimate(ybar, 0.0, band)?;
    let rate = 0.5 * params.alpha() * params.epsilon();

    let tau_y = MonotoneFn::new(times.clone(), ly_bar.clone())?;
    let mut clock = Vec::with_capacity(times.len());
    let mut ptr = 0usize;
    for (i, &t) in times.iter().enumerate() {
        let level = rate * lx_bar[i];
        while ptr + 1 < times.len() && tau_y.values()[ptr] <= level {
            ptr += 1;
        }
        // A budget beyond the total available floor local time can
        // never be honored inside this realization, so the horizontal
        // clock freezes for good.
        let tau = if tau_y.values()[ptr] > level {
            times[ptr]
        } else {
            f64::INFINITY
        };
        clock.push(t + tau);
    }

    let xi = invert_clock(&clock, &times);
    let n = times.len();
    let mut psi_x = Vec::with_capacity(n);
    let mut psi_y = Vec::with_capacity(n);
    let mut lx = Vec::with_capacity(n);
    let mut ly = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let xv = xbar.values();
    let yv = ybar.values();
    for (j, &i) in xi.iter().enumerate() {
        let k = j - i;
        psi_x.push(times[i]);
        psi_y.push(times[k]);
        lx.push(lx_bar[i]);
        ly.push(ly_bar[k]);
        // While the horizontal clock spends, the vertical path is
        // parked inside the floor band, which stands in for the floor
        // itself at this resolution; the coupled walk reports it as 0
        // so that spine states carry the exact-zero vertical value.
        let y = if j > 0 && i > xi[j - 1] { 0.0 } else { yv[k] };
        z.push([xv[i], y]);
    }
    Ok(GluedPath {
        z: SamplePath::new(grid, z)?,
        psi_x,
        psi_y,
        lx,
        ly,
    })
}

/// Vertical clock computed from its own inverse formula, with the
/// roles of the two paths exchanged, instead of as the complement of
/// the horizontal clock. Used to cross-check the coupled construction;
/// the two routes agree within twice the grid step.
pub fn y_clock_from_definition(
    xbar: &SamplePath<f64>,
    ybar: &SamplePath<f64>,
    params: &CombParams,
) -> Result<Vec<f64>, GlueError> {
    let band = check_pair(xbar, ybar, params)?;
    let grid = xbar.grid();
    let times: Vec<f64> = grid.times().collect();
    let lx_bar = junction_local_time(xbar, params.epsilon(), band)?;
    let ly_bar = local_time_estimate(ybar, 0.0, band)?;
    let rate = 2.0 / (params.alpha() * params.epsilon());

    let tau_x = MonotoneFn::new(times.clone(), lx_bar)?;
    let mut clock = Vec::with_capacity(times.len());
    let mut ptr = 0usize;
    for (i, &t) in times.iter().enumerate() {
        let level = rate * ly_bar[i];
        while ptr + 1 < times.len() && tau_x.values()[ptr] <= level {
            ptr += 1;
        }
        let tau = if tau_x.values()[ptr] > level {
            times[ptr]
        } else {
            f64::INFINITY
        };
        clock.push(t + tau);
    }
    let yi = invert_clock(&clock, &times);
    Ok(yi.into_iter().map(|i| times[i]).collect())
}

/// Draw one coupled state at time `t` from fresh driving paths started
/// at the origin junction with the vertical path at the floor.
pub fn sample_glued_state(
    params: &CombParams,
    t: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GluedState, GlueError> {
    let n_steps = (t / dt).round().max(1.0) as usize;
    let grid = TimeGrid::new(dt, n_steps)?;
    let sqrt_dt = dt.sqrt();
    let mut xv = Vec::with_capacity(grid.len());
    let mut x = 0.0;
    xv.push(x);
    for _ in 0..n_steps {
        let step: f64 = rng.sample(StandardNormal);
        x += step * sqrt_dt;
        xv.push(x);
    }
    let xbar = SamplePath::new(grid, xv)?;
    let ybar = simulate_reflected_bm(params.h0(), grid, 0.0, rng)?;
    let glued = glue_time_changes(&xbar, &ybar.path, params)?;
    let last = glued.z.values().len() - 1;
    Ok(GluedState {
        x: glued.z.values()[last][0],
        y: glued.z.values()[last][1],
        lx: glued.lx[last],
        ly: glued.ly[last],
    })
}

pub fn write_glued_path_csv<W: Write>(out: &mut W, path: &GluedPath) -> io::Result<()> {
    writeln!(out, "t,x,y,psi_x,psi_y,lx,ly")?;
    let times: Vec<f64> = path.grid().times().collect();
    for (j, &t) in times.iter().enumerate() {
        let [x, y] = path.z.values()[j];
        writeln!(
            out,
            "{t:.12e},{x:.12e},{y:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            path.psi_x[j], path.psi_y[j], path.lx[j], path.ly[j]
        )?;
    }
    Ok(())
}

pub fn write_glued_path_csv_file(file: &Path, path: &GluedPath) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(file)?);
    write_glued_path_csv(&mut out, path)
}
