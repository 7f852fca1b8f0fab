use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use comb_core::{CombParams, SamplePath, TimeGrid, ToothHeight};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::state::{GraphState, WalkCounters};
use crate::{GraphError, MAX_WALK_STEPS};

/// Relative tolerance for snapping continuous coordinates to the lattice.
const LATTICE_TOL: f64 = 1e-9;

/// Probability of stepping from a junction up into its tooth.
pub fn junction_up_probability(params: &CombParams) -> f64 {
    let ae = params.alpha() * params.epsilon();
    ae / (2.0 + ae)
}

/// Integer-lattice view of the walk. Spine sites are `i`, standing for
/// `x = i*delta`; tooth sites are `(k, j)` for `y = j*delta` above the
/// junction at `i = k*m`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Site {
    Spine(i64),
    Tooth(i64, i64),
}

#[derive(Debug, Clone, Copy)]
struct Lattice {
    delta: f64,
    /// Sites per tooth spacing: epsilon = m * delta.
    m: i64,
    /// Tooth height in lattice steps; None for bottomless teeth.
    j_top: Option<i64>,
    up_prob: f64,
    side_prob: f64,
}

impl Lattice {
    fn new(params: &CombParams, delta: f64) -> Result<Self, GraphError> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(GraphError::InvalidDelta(delta));
        }
        let epsilon = params.epsilon();
        let m = (epsilon / delta).round();
        if m < 1.0 || (m * delta - epsilon).abs() > LATTICE_TOL * epsilon {
            return Err(GraphError::IncompatibleSpacing { delta, epsilon });
        }
        let j_top = match params.h0() {
            ToothHeight::Infinite => None,
            ToothHeight::Finite(h0) => {
                let j = (h0 / delta).round();
                if j < 1.0 || (j * delta - h0).abs() > LATTICE_TOL * h0.max(1.0) {
                    return Err(GraphError::IncompatibleHeight { delta, h0 });
                }
                Some(j as i64)
            }
        };
        let ae = params.alpha() * epsilon;
        Ok(Lattice {
            delta,
            m: m as i64,
            j_top,
            up_prob: ae / (2.0 + ae),
            side_prob: 1.0 / (2.0 + ae),
        })
    }

    fn is_junction(&self, i: i64) -> bool {
        i.rem_euclid(self.m) == 0
    }

    /// Spine site exactly one lattice step away from a junction.
    fn is_flank(&self, i: i64) -> bool {
        let r = i.rem_euclid(self.m);
        r == 1 || r == self.m - 1
    }

    fn to_site(&self, state: GraphState, h0: ToothHeight) -> Result<Site, GraphError> {
        match state {
            GraphState::Spine { x } => {
                let i = (x / self.delta).round();
                if (i * self.delta - x).abs() > LATTICE_TOL * x.abs().max(1.0) {
                    return Err(GraphError::OffLattice {
                        x,
                        delta: self.delta,
                    });
                }
                Ok(Site::Spine(i as i64))
            }
            GraphState::Tooth { k, y } => {
                let h = h0.as_f64();
                let j = (y / self.delta).round();
                let bad = y <= 0.0
                    || y > h
                    || j < 1.0
                    || (j * self.delta - y).abs() > LATTICE_TOL * y.max(1.0);
                if bad {
                    return Err(GraphError::BadToothPosition { y, h0: h });
                }
                Ok(Site::Tooth(k, j as i64))
            }
        }
    }

    fn to_state(&self, site: Site) -> GraphState {
        match site {
            Site::Spine(i) => GraphState::Spine {
                x: i as f64 * self.delta,
            },
            Site::Tooth(k, j) => GraphState::Tooth {
                k,
                y: j as f64 * self.delta,
            },
        }
    }

    #[inline]
    fn step(&self, site: Site, rng: &mut ChaCha8Rng) -> Site {
        match site {
            Site::Spine(i) if self.is_junction(i) => {
                let u: f64 = rng.random();
                if u < self.up_prob {
                    Site::Tooth(i.div_euclid(self.m), 1)
                } else if u < self.up_prob + self.side_prob {
                    Site::Spine(i - 1)
                } else {
                    Site::Spine(i + 1)
                }
            }
            Site::Spine(i) => {
                if rng.random::<bool>() {
                    Site::Spine(i + 1)
                } else {
                    Site::Spine(i - 1)
                }
            }
            Site::Tooth(k, j) => {
                let down = self.j_top == Some(j) || !rng.random::<bool>();
                let j_next = if down { j - 1 } else { j + 1 };
                if j_next == 0 {
                    Site::Spine(k * self.m)
                } else {
                    Site::Tooth(k, j_next)
                }
            }
        }
    }
}

/// Advance the walk by a single lattice step (one `delta^2` of model
/// time). The state must lie on the lattice determined by `delta`.
pub fn step_graph_walk(
    state: GraphState,
    params: &CombParams,
    delta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GraphState, GraphError> {
    let lat = Lattice::new(params, delta)?;
    let site = lat.to_site(state, params.h0())?;
    Ok(lat.to_state(lat.step(site, rng)))
}

fn checked_steps(delta: f64, t_max: f64) -> Result<u64, GraphError> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(GraphError::InvalidHorizon(t_max));
    }
    let steps = (t_max / (delta * delta)).round();
    if steps < 1.0 {
        return Err(GraphError::InvalidHorizon(t_max));
    }
    if steps > MAX_WALK_STEPS as f64 {
        return Err(GraphError::StepBudget {
            t_max,
            steps: steps as u64,
            budget: MAX_WALK_STEPS,
        });
    }
    Ok(steps as u64)
}

/// Tally one pre-move state into the running counts.
#[inline]
fn tally(lat: &Lattice, site: Site, c: &mut RawCounts) {
    match site {
        Site::Spine(i) => {
            if lat.is_junction(i) {
                c.junction_visits += 1;
            } else if lat.is_flank(i) {
                c.flank_visits += 1;
            }
        }
        Site::Tooth(_, 1) => c.foot_visits += 1,
        Site::Tooth(..) => {}
    }
}

#[derive(Default)]
struct RawCounts {
    junction_visits: u64,
    tooth_entries: u64,
    flank_visits: u64,
    foot_visits: u64,
}

impl RawCounts {
    fn finish(self, delta: f64) -> WalkCounters {
        WalkCounters::from_counts(
            self.junction_visits,
            self.tooth_entries,
            self.flank_visits,
            self.foot_visits,
            delta,
        )
    }
}

/// A stored walk: the state path, its projection to coordinates, and
/// the visit counters.
#[derive(Debug, Clone)]
pub struct GraphRun {
    pub states: SamplePath<GraphState>,
    pub projected: SamplePath<[f64; 2]>,
    pub counters: WalkCounters,
}

impl GraphRun {
    pub fn grid(&self) -> TimeGrid {
        self.states.grid()
    }
}

/// Simulate from the origin junction, storing the full path.
pub fn simulate_graph(
    params: &CombParams,
    delta: f64,
    t_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GraphRun, GraphError> {
    simulate_graph_from(GraphState::Spine { x: 0.0 }, params, delta, t_max, rng)
}

/// Simulate from a given state, storing the full path.
pub fn simulate_graph_from(
    start: GraphState,
    params: &CombParams,
    delta: f64,
    t_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GraphRun, GraphError> {
    let lat = Lattice::new(params, delta)?;
    let n = checked_steps(delta, t_max)?;
    let mut site = lat.to_site(start, params.h0())?;
    let mut counts = RawCounts::default();
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(lat.to_state(site));
    for _ in 0..n {
        let was_tooth = matches!(site, Site::Tooth(..));
        tally(&lat, site, &mut counts);
        site = lat.step(site, rng);
        if !was_tooth && matches!(site, Site::Tooth(..)) {
            counts.tooth_entries += 1;
        }
        states.push(lat.to_state(site));
    }
    let grid = TimeGrid::new(delta * delta, n as usize).expect("validated step count");
    let projected: Vec<[f64; 2]> = states
        .iter()
        .map(|s| s.project(params.epsilon()))
        .collect();
    Ok(GraphRun {
        states: SamplePath::new(grid, states).expect("lengths match by construction"),
        projected: SamplePath::new(grid, projected).expect("lengths match by construction"),
        counters: counts.finish(delta),
    })
}

/// Run the walk without storing the path; returns the final state and
/// the counters. Used for large Monte Carlo batteries.
pub fn run_graph_walk(
    params: &CombParams,
    delta: f64,
    t_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(GraphState, WalkCounters), GraphError> {
    let lat = Lattice::new(params, delta)?;
    let n = checked_steps(delta, t_max)?;
    let mut site = Site::Spine(0);
    let mut counts = RawCounts::default();
    for _ in 0..n {
        let was_tooth = matches!(site, Site::Tooth(..));
        tally(&lat, site, &mut counts);
        site = lat.step(site, rng);
        if !was_tooth && matches!(site, Site::Tooth(..)) {
            counts.tooth_entries += 1;
        }
    }
    Ok((lat.to_state(site), counts.finish(delta)))
}

/// Write a stored walk as CSV with the projected coordinates and the
/// branch tag per row.
pub fn write_graph_path_csv<W: Write>(out: &mut W, run: &GraphRun) -> io::Result<()> {
    writeln!(out, "t,x,y,branch")?;
    let grid = run.grid();
    for (k, (state, xy)) in run
        .states
        .values()
        .iter()
        .zip(run.projected.values())
        .enumerate()
    {
        let branch = if state.is_tooth() { "tooth" } else { "spine" };
        writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{}",
            grid.time_at(k),
            xy[0],
            xy[1],
            branch
        )?;
    }
    Ok(())
}

pub fn write_graph_path_csv_file(file: &Path, run: &GraphRun) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(file)?);
    write_graph_path_csv(&mut out, run)
}
