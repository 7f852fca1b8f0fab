//! Exact occupation-time law of the boundary for infinite teeth.
//!
//! For the sticky coordinate started at 0 with h0 = ∞, the total time
//! spent at the boundary up to t has the explicit representation
//!
//! ```text
//! O_t = (2|N|/alpha) * sqrt(t + N^2/alpha^2) - 2 N^2/alpha^2
//! ```
//!
//! with N standard normal. Writing a = |N|/alpha, the bound
//! 2a·sqrt(t + a^2) <= t + 2a^2 forces O_t ∈ [0, t], and O_t is
//! strictly increasing in |N|: heavy boundary occupation corresponds to
//! large excursions of the driving local time.

use crate::LimitError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The occupation-time value for a given normal draw `n`.
pub fn occupation_value(alpha: f64, t: f64, n: f64) -> f64 {
    let a = n.abs() / alpha;
    let value = 2.0 * a * (t + a * a).sqrt() - 2.0 * a * a;
    // The bound holds algebraically; the clamp only absorbs the last
    // ulp of rounding.
    value.clamp(0.0, t)
}

/// Draw one sample of the boundary occupation time up to `t`.
pub fn sample_occupation_time(
    alpha: f64,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, LimitError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(LimitError::InvalidAlpha(alpha));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(LimitError::InvalidTime(t));
    }
    let n: f64 = rng.sample(StandardNormal);
    Ok(occupation_value(alpha, t, n))
}
