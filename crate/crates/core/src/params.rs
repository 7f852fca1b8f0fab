//! Model parameters for the comb geometry.
//!
//! The comb consists of a spine along the x-axis with teeth of height
//! `h0` attached at the points of `epsilon * Z`. In the fattened planar
//! picture the spine is a strip of width `w_S = epsilon^sigma` and each
//! tooth a strip of width `w_T = alpha * epsilon^(1+sigma)`, so the
//! width ratio `w_T / (epsilon * w_S)` equals `alpha` exactly.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Tooth height. Infinite teeth are a first-class configuration, kept
/// as a separate variant so finite-height arithmetic never sees
/// `f64::INFINITY` by accident.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToothHeight {
    Finite(f64),
    Infinite,
}

impl ToothHeight {
    /// Parse from user input; accepts a positive number or the literal
    /// `inf` (case-insensitive).
    pub fn parse(text: &str) -> Result<Self, ParamError> {
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("inf") || trimmed == "+inf" {
            return Ok(ToothHeight::Infinite);
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|_| ParamError::InvalidToothHeight(trimmed.to_string()))?;
        ToothHeight::finite(value)
    }

    /// A validated finite height.
    pub fn finite(value: f64) -> Result<Self, ParamError> {
        if !value.is_finite() || value <= 0.0 {
            return Err(ParamError::InvalidToothHeight(value.to_string()));
        }
        Ok(ToothHeight::Finite(value))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ToothHeight::Infinite)
    }

    /// The finite value, if there is one.
    pub fn value(&self) -> Option<f64> {
        match self {
            ToothHeight::Finite(h) => Some(*h),
            ToothHeight::Infinite => None,
        }
    }

    /// The height as an `f64`, mapping the infinite variant to
    /// `f64::INFINITY`. Useful for comparisons like `y < h0`.
    pub fn as_f64(&self) -> f64 {
        match self {
            ToothHeight::Finite(h) => *h,
            ToothHeight::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ToothHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToothHeight::Finite(h) => write!(f, "{h}"),
            ToothHeight::Infinite => write!(f, "inf"),
        }
    }
}

// Serialized as a plain number, or the string "inf" for the infinite
// variant, so manifests stay readable and round-trip exactly.
impl Serialize for ToothHeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ToothHeight::Finite(h) => serializer.serialize_f64(*h),
            ToothHeight::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ToothHeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct HeightVisitor;

        impl<'de> Visitor<'de> for HeightVisitor {
            type Value = ToothHeight;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                ToothHeight::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                ToothHeight::parse(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(HeightVisitor)
    }
}

/// Validated parameter bundle shared by every simulator and solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombParams {
    alpha: f64,
    h0: ToothHeight,
    epsilon: f64,
    scaling_sigma: f64,
}

impl CombParams {
    /// Build a parameter set with the default width scaling
    /// `scaling_sigma = 1`.
    ///
    /// `alpha = 0` is accepted as the degenerate no-teeth mode used by
    /// calibration tests; every positive finite `alpha` is a normal
    /// configuration.
    pub fn new(alpha: f64, h0: ToothHeight, epsilon: f64) -> Result<Self, ParamError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(ParamError::InvalidAlpha(alpha));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 0.5 {
            return Err(ParamError::InvalidEpsilon(epsilon));
        }
        Ok(CombParams {
            alpha,
            h0,
            epsilon,
            scaling_sigma: 1.0,
        })
    }

    /// Replace the width-scaling exponent.
    pub fn with_scaling_sigma(mut self, scaling_sigma: f64) -> Result<Self, ParamError> {
        if !scaling_sigma.is_finite() || scaling_sigma <= 0.0 {
            return Err(ParamError::InvalidScalingSigma(scaling_sigma));
        }
        self.scaling_sigma = scaling_sigma;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h0(&self) -> ToothHeight {
        self.h0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn scaling_sigma(&self) -> f64 {
        self.scaling_sigma
    }

    /// Width of the fattened spine, `epsilon^sigma`.
    pub fn spine_width(&self) -> f64 {
        self.epsilon.powf(self.scaling_sigma)
    }

    /// Width of a fattened tooth, `alpha * epsilon^(1+sigma)`.
    ///
    /// Computed as `alpha * (epsilon * spine_width())` so that
    /// `tooth_width() == alpha * (epsilon * spine_width())` holds
    /// bit-exactly and the width ratio never drifts from `alpha`.
    pub fn tooth_width(&self) -> f64 {
        self.alpha * (self.epsilon * self.spine_width())
    }

    /// The defining width ratio `tooth_width / (epsilon * spine_width)`.
    pub fn width_ratio(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("epsilon must lie in (0, 0.5], got {0}")]
    InvalidEpsilon(f64),
    #[error("tooth height must be a positive number or \"inf\", got {0}")]
    InvalidToothHeight(String),
    #[error("scaling_sigma must be finite and > 0, got {0}")]
    InvalidScalingSigma(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_ratio_is_exact() {
        for &(alpha, eps, sigma) in &[(1.0, 0.1, 1.0), (0.7, 0.05, 0.5), (3.0, 0.5, 2.0)] {
            let p = CombParams::new(alpha, ToothHeight::Finite(1.0), eps)
                .unwrap()
                .with_scaling_sigma(sigma)
                .unwrap();
            assert_eq!(p.tooth_width(), alpha * (p.epsilon() * p.spine_width()));
            assert_eq!(p.width_ratio(), alpha);
            let ratio = p.tooth_width() / (p.epsilon() * p.spine_width());
            assert!((ratio - alpha).abs() <= f64::EPSILON * alpha);
        }
    }

    #[test]
    fn rejects_out_of_range_epsilon() {
        let h0 = ToothHeight::Finite(1.0);
        assert!(CombParams::new(1.0, h0, 0.0).is_err());
        assert!(CombParams::new(1.0, h0, 0.51).is_err());
        assert!(CombParams::new(1.0, h0, 0.5).is_ok());
    }

    #[test]
    fn parses_infinite_height() {
        assert_eq!(ToothHeight::parse("inf").unwrap(), ToothHeight::Infinite);
        assert_eq!(ToothHeight::parse("INF").unwrap(), ToothHeight::Infinite);
        assert_eq!(
            ToothHeight::parse("2.5").unwrap(),
            ToothHeight::Finite(2.5)
        );
        assert!(ToothHeight::parse("-1").is_err());
        assert!(ToothHeight::parse("nan").is_err());
    }
}
