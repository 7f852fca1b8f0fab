//! Inversion of the additive functional `phi(s) = s + (2/alpha) Lbar_s`.

use crate::LimitError;
use comb_core::TimeGrid;

/// Compute the time change `T_t = inf{s : s + (2/alpha) Lbar_s >= t}`
/// on the grid carrying `Lbar`.
///
/// `phi` is interpolated linearly between grid nodes, which makes the
/// identity `T_t + (2/alpha) Lbar(T_t) = t` exact rather than merely
/// within one step, and keeps `T` continuous with increments at most
/// `dt` (the slope of `phi` never drops below 1).
pub fn build_sticky_time_change(
    lbar: &[f64],
    grid: TimeGrid,
    alpha: f64,
) -> Result<Vec<f64>, LimitError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(LimitError::InvalidAlpha(alpha));
    }
    if lbar.len() != grid.len() {
        return Err(LimitError::Grid(comb_core::GridError::LengthMismatch {
            expected: grid.len(),
            actual: lbar.len(),
        }));
    }
    if lbar[0] != 0.0 {
        return Err(LimitError::NotMonotone(0));
    }
    if let Some(k) = lbar.windows(2).position(|w| w[1] < w[0]) {
        return Err(LimitError::NotMonotone(k + 1));
    }

    let dt = grid.dt();
    let scale = 2.0 / alpha;
    let phi_at = |j: usize| grid.time_at(j) + scale * lbar[j];

    let mut t_change = Vec::with_capacity(grid.len());
    t_change.push(0.0);
    // Forward sweep: j tracks the segment [s_j, s_{j+1}] whose phi
    // values bracket the current target time.
    let mut j = 0usize;
    for k in 1..grid.len() {
        let target = grid.time_at(k);
        while phi_at(j + 1) < target {
            j += 1;
        }
        let (lo, hi) = (phi_at(j), phi_at(j + 1));
        debug_assert!(lo <= target && target <= hi);
        let frac = if hi > lo { (target - lo) / (hi - lo) } else { 0.0 };
        t_change.push(grid.time_at(j) + frac * dt);
    }
    Ok(t_change)
}
