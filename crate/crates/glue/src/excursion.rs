//! Traversal times of a free path between neighboring junctions, and
//! the sampled inverse of its junction local time.

use comb_core::{default_band, SamplePath};

use crate::glue::junction_local_time;
use crate::GlueError;

const LEVEL_CELLS: usize = 256;

/// Durations between successive first arrivals at distinct junctions,
/// together with the inverse junction local time sampled on an evenly
/// spaced grid of levels.
#[derive(Debug, Clone)]
pub struct Excursions {
    durations: Vec<f64>,
    levels: Vec<f64>,
    tau: Vec<f64>,
}

impl Excursions {
    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    /// Local-time levels at which the inverse was sampled.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Inverse junction local time at each level, saturating at the
    /// end of the path.
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }
}

/// Scan a path for junction-to-junction traversals.
///
/// An event is the first arrival at a junction different from the one
/// last visited; crossing times are linearly interpolated inside each
/// Euler cell. Returns of the path to the junction it last visited are
/// not events, so each duration is the time a traversal to a neighbor
/// actually took.
pub fn excursion_durations(
    xbar: &SamplePath<f64>,
    epsilon: f64,
) -> Result<Excursions, GlueError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(GlueError::BadSpacing { epsilon });
    }
    let grid = xbar.grid();
    let dt = grid.dt();
    let required = epsilon * epsilon / 64.0;
    if dt > required {
        return Err(GlueError::ResolutionTooCoarse { dt, required });
    }

    let values = xbar.values();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GlueError::NonFinitePath);
    }
    let x0 = values[0];
    let k0 = (x0 / epsilon).round();
    let mut cur: Option<i64> = if x0 == k0 * epsilon {
        Some(k0 as i64)
    } else {
        None
    };
    let mut last_time = 0.0;
    let mut durations = Vec::new();
    let mut visit = |cur: &mut Option<i64>, k: i64, t: f64| {
        if *cur == Some(k) {
            return;
        }
        if cur.is_some() {
            durations.push(t - last_time);
        }
        *cur = Some(k);
        last_time = t;
    };

    for i in 0..grid.n_steps() {
        let a = values[i];
        let b = values[i + 1];
        if a == b {
            continue;
        }
        let t0 = grid.time_at(i);
        let slope = dt / (b - a);
        if b > a {
            let mut k = (a / epsilon).floor() as i64 + 1;
            while k as f64 * epsilon <= b {
                let site = k as f64 * epsilon;
                if site > a {
                    visit(&mut cur, k, t0 + (site - a) * slope);
                }
                k += 1;
            }
        } else {
            let mut k = (a / epsilon).ceil() as i64 - 1;
            while k as f64 * epsilon >= b {
                let site = k as f64 * epsilon;
                if site < a {
                    visit(&mut cur, k, t0 + (site - a) * slope);
                }
                k -= 1;
            }
        }
    }
    if durations.len() < 10 {
        return Err(GlueError::TooFewExcursions {
            found: durations.len(),
        });
    }

    let lx = junction_local_time(xbar, epsilon, default_band(dt))?;
    let total = *lx.last().unwrap();
    let mut levels = Vec::with_capacity(LEVEL_CELLS + 1);
    let mut tau = Vec::with_capacity(LEVEL_CELLS + 1);
    let mut ptr = 0usize;
    for m in 0..=LEVEL_CELLS {
        let level = total * m as f64 / LEVEL_CELLS as f64;
        while ptr + 1 < lx.len() && lx[ptr] <= level {
            ptr += 1;
        }
        levels.push(level);
        tau.push(grid.time_at(ptr));
    }
    Ok(Excursions {
        durations,
        levels,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use comb_core::{derive_stream, TimeGrid};
    use rand::Rng;
    use rand_distr::StandardNormal;

    const DT: f64 = 1.0 / 64.0;

    fn path(values: Vec<f64>) -> SamplePath<f64> {
        let grid = TimeGrid::new(DT, values.len() - 1).unwrap();
        SamplePath::new(grid, values).unwrap()
    }

    #[test]
    fn handcrafted_crossings_give_exact_durations() {
        let mut values = Vec::new();
        for i in 0..20 {
            values.push((i % 2) as f64);
        }
        values.push(-0.5);
        values.push(-1.0);
        let exc = excursion_durations(&path(values), 1.0).unwrap();
        let d = exc.durations();
        assert_eq!(d.len(), 21);
        for &v in &d[..19] {
            assert!((v - DT).abs() < 1e-15);
        }
        assert!((d[19] - 2.0 / 3.0 * DT).abs() < 1e-15);
        assert!((d[20] - 4.0 / 3.0 * DT).abs() < 1e-15);
    }

    #[test]
    fn revisits_of_the_same_junction_are_not_events() {
        let mut values = vec![0.0];
        for _ in 0..6 {
            values.push(0.6);
            values.push(0.9);
            values.push(1.1);
            values.push(0.8);
            values.push(1.2);
            values.push(2.0);
            values.push(1.0);
            values.push(0.0);
        }
        let exc = excursion_durations(&path(values), 1.0).unwrap();
        assert_eq!(exc.durations().len(), 4 * 6);
        assert!(exc.durations().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let values: Vec<f64> = (0..=20).map(|i| (i % 2) as f64).collect();
        let p = path(values);
        assert!(matches!(
            excursion_durations(&p, 0.0),
            Err(GlueError::BadSpacing { .. })
        ));
        assert!(matches!(
            excursion_durations(&p, 0.5),
            Err(GlueError::ResolutionTooCoarse { .. })
        ));
        let short = path(vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            excursion_durations(&short, 1.0),
            Err(GlueError::TooFewExcursions { found: 4 })
        ));
    }

    #[test]
    fn inverse_local_time_table_is_monotone() {
        let grid = TimeGrid::new(1.0 / 256.0, 16_384).unwrap();
        let mut rng = derive_stream(41_100, 0).rng();
        let sqrt_dt = grid.dt().sqrt();
        let mut values = vec![0.0];
        for _ in 0..grid.n_steps() {
            let step: f64 = rng.sample(StandardNormal);
            values.push(values.last().unwrap() + step * sqrt_dt);
        }
        let xbar = SamplePath::new(grid, values).unwrap();
        let exc = excursion_durations(&xbar, 1.0).unwrap();
        assert!(exc.durations().len() >= 10);
        assert!(exc.durations().iter().all(|&d| d > 0.0));
        assert_eq!(exc.levels().len(), 257);
        assert_eq!(exc.tau().len(), 257);
        assert!(exc.levels().windows(2).all(|w| w[1] >= w[0]));
        assert!(exc.tau().windows(2).all(|w| w[1] >= w[0]));
        assert!(exc.tau()[0] > 0.0);
        assert_eq!(*exc.tau().last().unwrap(), grid.t_max());
        assert!(*exc.levels().last().unwrap() > 0.0);
    }
}
