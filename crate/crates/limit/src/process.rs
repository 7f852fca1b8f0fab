//! The full limit process `Z = (X, Y)` and its invariants.

use crate::reflected::{fold, simulate_reflected_bm};
use crate::time_change::build_sticky_time_change;
use crate::LimitError;
use comb_core::{default_band, CombParams, SamplePath, TimeGrid, ToothHeight};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{self, Write};
use std::path::Path;

/// One simulated path of the limit process on a uniform grid.
#[derive(Debug, Clone)]
pub struct LimitPath {
    grid: TimeGrid,
    x: Vec<f64>,
    y: Vec<f64>,
    /// Boundary local time of Y at 0.
    l: Vec<f64>,
    /// Time change T: time the underlying reflected motion has run.
    t_change: Vec<f64>,
}

impl LimitPath {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn local_time(&self) -> &[f64] {
        &self.l
    }

    pub fn time_change(&self) -> &[f64] {
        &self.t_change
    }

    /// The horizontal path as a plain sample path (for msd and KS
    /// comparisons).
    pub fn x_path(&self) -> SamplePath<f64> {
        SamplePath::new(self.grid, self.x.clone()).expect("lengths agree by construction")
    }
}

/// Simulate one limit-process path started at `(x0, y0)`.
///
/// The horizontal motion is a pre-simulated Brownian path indexed by
/// accumulated boundary local time, evaluated at `(2/alpha) L_t`, so
/// one path serves every grid time and X inherits continuity in t.
pub fn simulate_limit_process(
    params: &CombParams,
    grid: TimeGrid,
    start: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<LimitPath, LimitError> {
    let alpha = params.alpha();
    let h0 = params.h0();
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(LimitError::InvalidAlpha(alpha));
    }
    let (x0, y0) = start;
    if !x0.is_finite() {
        return Err(LimitError::InvalidStart { x: x0, y: y0 });
    }

    let reflected = simulate_reflected_bm(h0, grid, y0, rng)?;
    let t_change = build_sticky_time_change(&reflected.local_time, grid, alpha)?;
    let dt = grid.dt();
    let bbar = reflected.path.values();

    // L_t = Lbar(T_t) recovered from the exact inverse identity
    // T_t + (2/alpha) L_t = t, clamped monotone against rounding.
    let mut l = Vec::with_capacity(grid.len());
    let mut prev = 0.0f64;
    for (k, &tk) in t_change.iter().enumerate() {
        let lk = 0.5 * alpha * (grid.time_at(k) - tk);
        prev = prev.max(lk);
        l.push(prev);
    }

    // Y_t = Bbar(T_t), sampled at the left endpoint of the Euler cell
    // containing T_t. Left endpoints are what the local-time estimator
    // sees, so "L increases only while Y sits in the 0-band" holds
    // exactly under this convention.
    let y: Vec<f64> = t_change
        .iter()
        .map(|&tk| bbar[((tk / dt).floor() as usize).min(grid.n_steps())])
        .collect();

    // Independent Brownian path on a local-time grid of spacing dt,
    // spanning the total accumulated clock (2/alpha) L_max <= t_max.
    let ell_max = 2.0 / alpha * l[l.len() - 1];
    let n_knots = (ell_max / dt).ceil() as usize + 2;
    let sqrt_dt = dt.sqrt();
    let mut wbar = Vec::with_capacity(n_knots);
    let mut w = 0.0f64;
    wbar.push(w);
    for _ in 1..n_knots {
        let xi: f64 = rng.sample(StandardNormal);
        w += xi * sqrt_dt;
        wbar.push(w);
    }
    let x: Vec<f64> = l
        .iter()
        .map(|&lk| {
            let ell = 2.0 / alpha * lk;
            let j = ((ell / dt).floor() as usize).min(wbar.len() - 2);
            let frac = (ell / dt - j as f64).clamp(0.0, 1.0);
            x0 + wbar[j] + frac * (wbar[j + 1] - wbar[j])
        })
        .collect();

    Ok(LimitPath {
        grid,
        x,
        y,
        l,
        t_change,
    })
}

/// Check every structural invariant of a limit path; returns the first
/// violation found.
pub fn validate_limit_path(
    path: &LimitPath,
    alpha: f64,
    h0: ToothHeight,
) -> Result<(), LimitError> {
    let grid = path.grid;
    let dt = grid.dt();
    let band = default_band(dt);
    let n = grid.len();
    let violation = |msg: String| Err(LimitError::InvariantViolated(msg));

    if path.l[0] != 0.0 || path.t_change[0] != 0.0 {
        return violation("L and T must start at 0".into());
    }
    for k in 0..n {
        let t = grid.time_at(k);
        let (lk, tk, yk) = (path.l[k], path.t_change[k], path.y[k]);
        if !(0.0..=t + 1e-12).contains(&tk) {
            return violation(format!("T out of [0, t] at step {k}: {tk}"));
        }
        if (tk + 2.0 / alpha * lk - t).abs() > dt {
            return violation(format!("T + (2/alpha) L != t at step {k}"));
        }
        if yk < -1e-12 || yk > h0.as_f64() + 1e-12 {
            return violation(format!("Y out of range at step {k}: {yk}"));
        }
    }
    for k in 1..n {
        if path.l[k] < path.l[k - 1] {
            return violation(format!("L decreases at step {k}"));
        }
        if path.t_change[k] < path.t_change[k - 1] {
            return violation(format!("T decreases at step {k}"));
        }
        let dl = path.l[k] - path.l[k - 1];
        if dl > 1e-12 && path.y[k - 1] > band && path.y[k] > band {
            return violation(format!(
                "L increased at step {k} while Y stayed outside the 0-band"
            ));
        }
        // X moves only through boundary local time.
        if dl == 0.0 && path.x[k] != path.x[k - 1] {
            return violation(format!("X moved without local time at step {k}"));
        }
    }
    Ok(())
}

/// Final state of a limit-process path, sampled without storing the
/// path. Same discretization and law as `simulate_limit_process`
/// marginals; used for large Monte Carlo batteries.
#[derive(Debug, Clone, Copy)]
pub struct LimitState {
    pub x: f64,
    pub y: f64,
    pub local_time: f64,
    pub t_change: f64,
}

/// Sample the state of the limit process at a single time `t`.
pub fn sample_limit_state(
    alpha: f64,
    h0: ToothHeight,
    t: f64,
    dt: f64,
    start: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<LimitState, LimitError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(LimitError::InvalidAlpha(alpha));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(LimitError::InvalidTime(t));
    }
    let (x0, y0) = start;
    if !x0.is_finite() || !y0.is_finite() || y0 < 0.0 || y0 > h0.as_f64() {
        return Err(LimitError::InvalidStart { x: x0, y: y0 });
    }
    if t == 0.0 {
        return Ok(LimitState {
            x: x0,
            y: y0,
            local_time: 0.0,
            t_change: 0.0,
        });
    }

    let sqrt_dt = dt.sqrt();
    let band = default_band(dt);
    let weight = dt / (2.0 * band);
    let scale = 2.0 / alpha;

    // March Bbar until phi(s) = s + (2/alpha) Lbar_s crosses t.
    let mut y_prev = y0;
    let mut lbar = 0.0f64;
    let mut s = 0.0f64;
    let mut phi_prev = 0.0f64;
    let (t_change, y_at) = loop {
        let mut l_next = lbar;
        if y_prev > 0.0 && y_prev <= band {
            l_next += weight;
        }
        let xi: f64 = rng.sample(StandardNormal);
        let y_next = fold(y_prev + xi * sqrt_dt, h0);
        let s_next = s + dt;
        let phi_next = s_next + scale * l_next;
        if phi_next >= t {
            let frac = if phi_next > phi_prev {
                (t - phi_prev) / (phi_next - phi_prev)
            } else {
                0.0
            };
            // Left endpoint of the crossing cell, matching the pathwise
            // simulator's convention for Y at T_t.
            break (s + frac * dt, y_prev);
        }
        y_prev = y_next;
        lbar = l_next;
        s = s_next;
        phi_prev = phi_next;
    };

    // Exact identity: (2/alpha) L_t = t - T_t, so X_t is a Gaussian
    // with variance t - T_t.
    let ell = (t - t_change).max(0.0);
    let xi: f64 = rng.sample(StandardNormal);
    Ok(LimitState {
        x: x0 + ell.sqrt() * xi,
        y: y_at,
        local_time: 0.5 * alpha * ell,
        t_change,
    })
}

/// Write a limit path as CSV with at least 12 significant digits.
pub fn write_limit_path_csv<W: Write>(out: &mut W, path: &LimitPath) -> io::Result<()> {
    writeln!(out, "t,x,y,l,tchange")?;
    for k in 0..path.grid.len() {
        writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            path.grid.time_at(k),
            path.x[k],
            path.y[k],
            path.l[k],
            path.t_change[k]
        )?;
    }
    Ok(())
}

/// Convenience wrapper writing to a file path.
pub fn write_limit_path_csv_file(file: &Path, path: &LimitPath) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(file)?);
    write_limit_path_csv(&mut f, path)
}
