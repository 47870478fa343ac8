use super::Cx;
use crate::error::{Error, Result};
use crate::specfun::{cos_pi, sin_pi};
use serde::Serialize;
use std::f64::consts::PI;

/// Compound Poisson process with Lévy density e^{αx}/cosh(x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SechPoissonModel {
    pub alpha: f64,
}

impl SechPoissonModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha.abs() < 1.0) {
            return Err(Error::Domain(format!("sech model needs |alpha| < 1, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    /// Total jump intensity π sec(πα/2).
    pub fn jump_rate(&self) -> f64 {
        // same complex division as in g, so Ψ(0) cancels exactly
        (Cx::new(PI, 0.0) / cos_pi(Cx::new(-0.5 * self.alpha, 0.0))).re
    }

    /// Lattice points α + 4k. Every root sits within distance 1 of one.
    pub(crate) fn anchor(&self, idx: i64) -> f64 {
        self.alpha + 4.0 * idx as f64
    }

    pub(crate) fn g(&self, theta: Cx) -> Cx {
        self.jump_rate() - Cx::new(PI, 0.0) / cos_pi(theta * 0.5)
    }

    pub(crate) fn dg(&self, theta: Cx) -> Cx {
        let c = cos_pi(theta * 0.5);
        -0.5 * PI * PI * sin_pi(theta * 0.5) / (c * c)
    }

    /// Split ζ into (k, θ) with ζ = α + 4k + θ and θ ∈ [−2, 2).
    pub(crate) fn locate(&self, zeta: Cx) -> (i64, Cx) {
        let w = zeta - self.alpha;
        let k = (0.25 * w.re).round();
        if k == 0.0 {
            return (0, w);
        }
        (k as i64, w - 4.0 * k)
    }

    // Poles of Ψ(iζ) sit at θ = ±1 around every anchor.
    pub(crate) fn pole_distance(&self, theta: Cx) -> f64 {
        (theta - 1.0).norm().min((theta + 1.0).norm())
    }

    /// Closed-form η of the positive root α+η, for q ≥ 0.
    pub fn eta(&self, q: f64) -> f64 {
        2.0 / PI * (PI / (q + self.jump_rate())).acos()
    }
}
