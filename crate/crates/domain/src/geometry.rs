use comb_core::{CombParams, ToothHeight};

use crate::DomainError;

/// Reflection chains longer than this indicate a pathologically large
/// proposal; the step is then clamped to the last wall contact.
pub const DEFAULT_MAX_BOUNCE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Outcome of one reflected displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflected {
    pub point: Point2,
    pub bounces: u32,
    /// Set when the bounce budget ran out and the point was clamped to
    /// the boundary instead of fully folded.
    pub clamped: bool,
}

/// The comb domain: spine strip plus teeth, all walls axis-aligned.
#[derive(Debug, Clone, Copy)]
pub struct DomainGeometry {
    epsilon: f64,
    spine_width: f64,
    half_tooth: f64,
    h0: ToothHeight,
}

#[derive(Debug, Clone, Copy)]
enum Fold {
    AcrossX(f64),
    AcrossY(f64),
}

impl DomainGeometry {
    pub fn new(params: &CombParams) -> Result<Self, DomainError> {
        let tooth_width = params.tooth_width();
        if tooth_width >= params.epsilon() {
            return Err(DomainError::TeethOverlap {
                tooth_width,
                epsilon: params.epsilon(),
            });
        }
        Ok(DomainGeometry {
            epsilon: params.epsilon(),
            spine_width: params.spine_width(),
            half_tooth: 0.5 * tooth_width,
            h0: params.h0(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn spine_width(&self) -> f64 {
        self.spine_width
    }

    pub fn tooth_width(&self) -> f64 {
        2.0 * self.half_tooth
    }

    pub fn h0(&self) -> ToothHeight {
        self.h0
    }

    /// Largest time step that keeps sqrt(dt) at or below a quarter
    /// tooth width.
    pub fn max_dt(&self) -> f64 {
        let q = 0.5 * self.half_tooth;
        q * q
    }

    /// Distance from `x` to the nearest tooth center.
    fn center_distance(&self, x: f64) -> f64 {
        let k = (x / self.epsilon).round();
        (x - k * self.epsilon).abs()
    }

    /// Membership in the open domain.
    pub fn contains(&self, p: Point2) -> bool {
        if !p.is_finite() || p.y <= -self.spine_width {
            return false;
        }
        if p.y < 0.0 {
            return true;
        }
        if self.center_distance(p.x) >= self.half_tooth {
            return false;
        }
        match self.h0 {
            ToothHeight::Infinite => true,
            ToothHeight::Finite(h) => p.y < h,
        }
    }

    /// Membership in the closure (walls included).
    pub fn contains_closed(&self, p: Point2) -> bool {
        if !p.is_finite() || p.y < -self.spine_width {
            return false;
        }
        if p.y <= 0.0 {
            return true;
        }
        if self.center_distance(p.x) > self.half_tooth {
            return false;
        }
        match self.h0 {
            ToothHeight::Infinite => true,
            ToothHeight::Finite(h) => p.y <= h,
        }
    }

    /// Earliest boundary crossing of the open segment from `q` to `p`,
    /// as (parameter, crossing point, fold line). `q` must lie in the
    /// closure.
    fn earliest_exit(&self, q: Point2, p: Point2) -> Option<(f64, Point2, Fold)> {
        let dx = p.x - q.x;
        let dy = p.y - q.y;
        let mut best: Option<(f64, Fold)> = None;
        let mut consider = |tau: f64, fold: Fold| {
            if (0.0..=1.0).contains(&tau) && best.map_or(true, |(bt, _)| tau < bt) {
                best = Some((tau, fold));
            }
        };

        let floor = -self.spine_width;
        if p.y < floor && q.y >= floor {
            consider((floor - q.y) / dy, Fold::AcrossY(floor));
        }

        // Upward through y = 0 outside a tooth mouth.
        if q.y <= 0.0 && p.y > 0.0 {
            let tau = -q.y / dy;
            let xs = q.x + tau * dx;
            if self.center_distance(xs) >= self.half_tooth {
                consider(tau, Fold::AcrossY(0.0));
            }
        }

        if let ToothHeight::Finite(h) = self.h0 {
            if q.y <= h && p.y > h {
                let tau = (h - q.y) / dy;
                let xs = q.x + tau * dx;
                if self.center_distance(xs) <= self.half_tooth {
                    consider(tau, Fold::AcrossY(h));
                }
            }
        }

        // Tooth side walls crossed at positive height.
        if dx != 0.0 || q.y > 0.0 || p.y > 0.0 {
            let xmin = q.x.min(p.x);
            let xmax = q.x.max(p.x);
            let k_lo = ((xmin - self.half_tooth) / self.epsilon).floor() as i64;
            let k_hi = ((xmax + self.half_tooth) / self.epsilon).ceil() as i64;
            for k in k_lo..=k_hi {
                let c = k as f64 * self.epsilon;
                for side in [-1.0, 1.0] {
                    let wall = c + side * self.half_tooth;
                    let straddles = (q.x - wall) * (p.x - wall) < 0.0
                        || (q.x == wall && (p.x - wall) * side > 0.0);
                    if !straddles {
                        continue;
                    }
                    let tau = (wall - q.x) / dx;
                    let ys = q.y + tau * dy;
                    let below_top = match self.h0 {
                        ToothHeight::Infinite => true,
                        ToothHeight::Finite(h) => ys < h,
                    };
                    if ys > 0.0 && below_top {
                        consider(tau, Fold::AcrossX(wall));
                    }
                }
            }
        }

        best.map(|(tau, fold)| {
            let hit = Point2::new(q.x + tau * dx, q.y + tau * dy);
            (tau, hit, fold)
        })
    }

    /// Specular reflection of the displacement `from -> proposed`
    /// across every boundary segment it violates, in path order. When
    /// the bounce budget runs out the point is clamped to the last
    /// boundary contact and flagged.
    pub fn reflect_step(&self, from: Point2, proposed: Point2, max_bounce: u32) -> Reflected {
        // Fast paths: a step wholly inside the spine strip or wholly
        // inside one tooth cannot cross any wall.
        let floor = -self.spine_width;
        if from.y > floor && from.y < 0.0 && proposed.y > floor && proposed.y < 0.0 {
            return Reflected {
                point: proposed,
                bounces: 0,
                clamped: false,
            };
        }

        let mut q = from;
        let mut p = proposed;
        let mut bounces = 0;
        loop {
            match self.earliest_exit(q, p) {
                None => {
                    if self.contains_closed(p) {
                        return Reflected {
                            point: p,
                            bounces,
                            clamped: false,
                        };
                    }
                    // Numerical corner case: no crossing found yet the
                    // endpoint is outside. Clamp to the closure.
                    return Reflected {
                        point: self.clamp_to_closure(p),
                        bounces,
                        clamped: true,
                    };
                }
                Some((_, hit, fold)) => {
                    if bounces >= max_bounce {
                        return Reflected {
                            point: hit,
                            bounces,
                            clamped: true,
                        };
                    }
                    bounces += 1;
                    p = match fold {
                        Fold::AcrossX(line) => Point2::new(2.0 * line - p.x, p.y),
                        Fold::AcrossY(line) => Point2::new(p.x, 2.0 * line - p.y),
                    };
                    q = hit;
                }
            }
        }
    }

    fn clamp_to_closure(&self, p: Point2) -> Point2 {
        if !p.is_finite() {
            return Point2::new(0.0, 0.0);
        }
        let spine = Point2::new(p.x, p.y.clamp(-self.spine_width, 0.0));
        let c = (p.x / self.epsilon).round() * self.epsilon;
        let ty = match self.h0 {
            ToothHeight::Infinite => p.y.max(0.0),
            ToothHeight::Finite(h) => p.y.clamp(0.0, h),
        };
        let tooth = Point2::new(p.x.clamp(c - self.half_tooth, c + self.half_tooth), ty);
        let d2 = |a: Point2| (a.x - p.x).powi(2) + (a.y - p.y).powi(2);
        if d2(spine) <= d2(tooth) {
            spine
        } else {
            tooth
        }
    }
}
