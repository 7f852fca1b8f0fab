//! Doubly reflected Brownian motion on `[0, h0]`.

use crate::LimitError;
use comb_core::{default_band, local_time_estimate, SamplePath, TimeGrid, ToothHeight};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A reflected path together with its running boundary local time at 0.
#[derive(Debug, Clone)]
pub struct ReflectedPath {
    pub path: SamplePath<f64>,
    /// Band estimate of the local time at 0, one value per grid point.
    pub local_time: Vec<f64>,
}

/// Fold a proposed position back into `[0, h0]`.
///
/// Each fold is one specular reflection; for step sizes small against
/// `h0` the loop runs at most once.
#[inline]
pub(crate) fn fold(mut y: f64, h0: ToothHeight) -> f64 {
    match h0 {
        ToothHeight::Infinite => y.abs(),
        ToothHeight::Finite(h) => {
            loop {
                if y < 0.0 {
                    y = -y;
                } else if y > h {
                    y = 2.0 * h - y;
                } else {
                    return y;
                }
            }
        }
    }
}

/// Simulate reflected Brownian motion started at `y0` by Euler steps
/// with folding, and estimate its local time at 0 with the default
/// band `2 sqrt(dt)`.
pub fn simulate_reflected_bm(
    h0: ToothHeight,
    grid: TimeGrid,
    y0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ReflectedPath, LimitError> {
    if !y0.is_finite() || y0 < 0.0 || y0 > h0.as_f64() {
        return Err(LimitError::InvalidStart { x: 0.0, y: y0 });
    }
    let sqrt_dt = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut y = y0;
    values.push(y);
    for _ in 0..grid.n_steps() {
        let xi: f64 = rng.sample(StandardNormal);
        y = fold(y + xi * sqrt_dt, h0);
        values.push(y);
    }
    let path = SamplePath::new(grid, values)?;
    let local_time = local_time_estimate(&path, 0.0, default_band(grid.dt()))?;
    Ok(ReflectedPath { path, local_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use comb_core::derive_stream;

    #[test]
    fn stays_in_range() {
        let grid = TimeGrid::new(1e-3, 5_000).unwrap();
        let mut rng = derive_stream(3, 0).rng();
        let r = simulate_reflected_bm(ToothHeight::Finite(1.0), grid, 0.0, &mut rng).unwrap();
        assert!(r.path.values().iter().all(|&y| (0.0..=1.0).contains(&y)));
        assert!(r.local_time.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn folding_handles_large_overshoot() {
        let h = ToothHeight::Finite(1.0);
        assert_eq!(fold(-0.25, h), 0.25);
        assert_eq!(fold(1.25, h), 0.75);
        assert_eq!(fold(2.75, h), 0.75);
        assert_eq!(fold(-1.5, h), 0.5);
        assert_eq!(fold(0.7, h), 0.7);
        assert!((fold(1.4, h) - 0.6).abs() < 1e-12);
        assert_eq!(fold(-0.25, ToothHeight::Infinite), 0.25);
    }

    #[test]
    fn rejects_start_outside_range() {
        let grid = TimeGrid::new(1e-3, 10).unwrap();
        let mut rng = derive_stream(3, 1).rng();
        assert!(simulate_reflected_bm(ToothHeight::Finite(1.0), grid, 1.5, &mut rng).is_err());
        assert!(simulate_reflected_bm(ToothHeight::Finite(1.0), grid, -0.1, &mut rng).is_err());
    }
}
