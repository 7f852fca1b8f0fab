use serde::{Deserialize, Serialize};

/// Position on the comb graph: either on the spine or inside a tooth.
///
/// Tooth states carry the index `k` of the junction at `x = k*epsilon`
/// they are attached to and a height `y` in `(0, h0]`. The junction
/// point itself is a spine state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GraphState {
    Spine { x: f64 },
    Tooth { k: i64, y: f64 },
}

impl GraphState {
    /// Projected coordinates `(x, y)`; tooth states sit above their
    /// junction, spine states have `y = 0`.
    pub fn project(&self, epsilon: f64) -> [f64; 2] {
        match *self {
            GraphState::Spine { x } => [x, 0.0],
            GraphState::Tooth { k, y } => [k as f64 * epsilon, y],
        }
    }

    pub fn is_tooth(&self) -> bool {
        matches!(self, GraphState::Tooth { .. })
    }
}

/// Visit statistics of one walk.
///
/// `lx` is the discrete spine local time collected at the two lattice
/// sites flanking each junction, `ly` the tooth local time collected at
/// the tooth-foot site one step above the junction; both use the
/// visits-times-`delta/2` convention of the band estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkCounters {
    pub junction_visits: u64,
    pub tooth_entries: u64,
    pub lx: f64,
    pub ly: f64,
}

impl WalkCounters {
    pub(crate) fn from_counts(
        junction_visits: u64,
        tooth_entries: u64,
        flank_visits: u64,
        foot_visits: u64,
        delta: f64,
    ) -> Self {
        WalkCounters {
            junction_visits,
            tooth_entries,
            lx: flank_visits as f64 * delta * 0.5,
            ly: foot_visits as f64 * delta * 0.5,
        }
    }
}
