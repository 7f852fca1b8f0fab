//! Randomized structural checks for the monotone inverse and the
//! clock-trading coupling.

use comb_core::{default_band, derive_stream, CombParams, SamplePath, TimeGrid, ToothHeight};
use comb_glue::{
    excursion_durations, glue_time_changes, inverse_monotone, GlueError, MonotoneFn,
};
use comb_limit::simulate_reflected_bm;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const DT: f64 = 1.0 / 1024.0;

fn staircase() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((any::<bool>(), 0.0..0.5f64), 1..120).prop_map(|steps| {
        let mut values = vec![0.0];
        let mut acc = 0.0;
        for (jump, size) in steps {
            if jump {
                acc += size;
            }
            values.push(acc);
        }
        values
    })
}

fn brownian(grid: TimeGrid, rng: &mut ChaCha8Rng, scale: f64) -> SamplePath<f64> {
    let sqrt_dt = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut x = 0.0;
    values.push(x);
    for _ in 0..grid.n_steps() {
        let step: f64 = rng.sample(StandardNormal);
        x += step * sqrt_dt * scale;
        values.push(x);
    }
    SamplePath::new(grid, values).unwrap()
}

proptest! {
    #[test]
    fn inverse_agrees_with_linear_scan(values in staircase(), qs in prop::collection::vec(-0.05..1.05f64, 1..40)) {
        let grid = TimeGrid::new(0.125, values.len() - 1).unwrap();
        let f = MonotoneFn::from_grid(grid, values.clone()).unwrap();
        let times: Vec<f64> = grid.times().collect();
        let top = *values.last().unwrap();
        for q in qs {
            let level = q * top.max(0.1);
            let brute = values
                .iter()
                .position(|&v| v > level)
                .map(|idx| (times[idx], false))
                .unwrap_or((*times.last().unwrap(), true));
            prop_assert_eq!(inverse_monotone(&f, level), brute);
        }
    }

    #[test]
    fn inverse_never_undershoots(values in staircase()) {
        let grid = TimeGrid::new(0.125, values.len() - 1).unwrap();
        let f = MonotoneFn::from_grid(grid, values.clone()).unwrap();
        let times: Vec<f64> = grid.times().collect();
        for (s, &v) in values.iter().enumerate() {
            let (t, _) = inverse_monotone(&f, v);
            prop_assert!(t >= times[s]);
        }
    }

    #[test]
    fn glued_paths_satisfy_structural_invariants(
        seed in 0u64..1_000,
        n_steps in 64usize..512,
        alpha in 0.25f64..2.0,
        eps_choice in 0usize..3,
    ) {
        let epsilon = [0.25, 0.375, 0.5][eps_choice];
        let params = CombParams::new(alpha, ToothHeight::Finite(1.0), epsilon).unwrap();
        let grid = TimeGrid::new(DT, n_steps).unwrap();
        let mut rng = derive_stream(43_000 + seed, 0).rng();
        let xbar = brownian(grid, &mut rng, 1.0);
        let ybar = simulate_reflected_bm(ToothHeight::Finite(1.0), grid, 0.0, &mut rng).unwrap();
        let glued = glue_time_changes(&xbar, &ybar.path, &params).unwrap();

        let band = default_band(DT);
        let times: Vec<f64> = grid.times().collect();
        let rate = 0.5 * alpha * epsilon;
        let slack = (1.0 + rate) * DT / (2.0 * band) + 1e-12;
        let z = glued.z().values();
        for j in 0..grid.len() {
            prop_assert!((0.0..=1.0).contains(&z[j][1]));
            prop_assert_eq!(glued.psi_x()[j] + glued.psi_y()[j], times[j]);
            let gap = rate * glued.lx()[j] - glued.ly()[j];
            prop_assert!(gap >= -1e-12, "budget overshoot {} at {}", gap, j);
            prop_assert!(gap <= slack, "budget lag {} > {} at {}", gap, slack, j);
            if j == 0 {
                continue;
            }
            let dpx = glued.psi_x()[j] - glued.psi_x()[j - 1];
            let dpy = glued.psi_y()[j] - glued.psi_y()[j - 1];
            prop_assert!((dpx == DT && dpy == 0.0) || (dpx == 0.0 && dpy == DT));
            if dpx > 0.0 {
                prop_assert_eq!(z[j][1], 0.0);
                prop_assert!((z[j][1] - z[j - 1][1]).abs() <= band);
                let k = j - (glued.psi_x()[j] / DT).round() as usize;
                let parked = ybar.path.values()[k];
                prop_assert!(parked > 0.0 && parked <= band);
            } else {
                prop_assert_eq!(z[j][0], z[j - 1][0]);
            }
        }
    }

    #[test]
    fn traversals_are_positive_when_present(seed in 0u64..400, drift in 0.5f64..3.0) {
        let grid = TimeGrid::new(1.0 / 64.0, 4_096).unwrap();
        let mut rng = derive_stream(43_500 + seed, 0).rng();
        let xbar = brownian(grid, &mut rng, drift);
        match excursion_durations(&xbar, 1.0) {
            Ok(exc) => {
                prop_assert!(exc.durations().len() >= 10);
                prop_assert!(exc.durations().iter().all(|&d| d > 0.0));
                prop_assert!(exc.tau().windows(2).all(|w| w[1] >= w[0]));
            }
            Err(GlueError::TooFewExcursions { found }) => prop_assert!(found < 10),
            Err(other) => prop_assert!(false, "unexpected error {}", other),
        }
    }
}
