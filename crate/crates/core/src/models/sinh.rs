use super::Cx;
use crate::error::{Error, Result};
use crate::specfun::{cot_pi, sin_pi, BERNOULLI};
use serde::Serialize;
use std::f64::consts::PI;

/// Process with Lévy density e^{αx}/sinh²(x/2), Gaussian part σ and drift μ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SinhSquareModel {
    pub alpha: f64,
    pub sigma: f64,
    pub mu: f64,
    pub gamma_c: f64,
    pub rho_c: f64,
}

/// x cot x, even in x, with a series near the origin.
pub(crate) fn xcotx(x: Cx) -> Cx {
    if x.norm() < 0.5 {
        // Σ (−1)^k 2^{2k} B_{2k} x^{2k} / (2k)!
        let x2 = x * x;
        let mut sum = Cx::new(1.0, 0.0);
        let mut pw = Cx::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut four = 1.0;
        for (j, b) in BERNOULLI.iter().take(14).enumerate() {
            let k = j as f64 + 1.0;
            pw *= -x2;
            fact *= (2.0 * k - 1.0) * (2.0 * k);
            four *= 4.0;
            sum += pw * (four * b / fact);
        }
        sum
    } else {
        x * cot_pi(x / PI)
    }
}

/// d/dx (x cot x).
pub(crate) fn xcotx_prime(x: Cx) -> Cx {
    if x.norm() < 0.5 {
        let x2 = x * x;
        let mut sum = Cx::new(0.0, 0.0);
        let mut pw = Cx::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut four = 1.0;
        for (j, b) in BERNOULLI.iter().take(14).enumerate() {
            let k = j as f64 + 1.0;
            if j > 0 {
                pw *= -x2;
            } else {
                pw = -x;
            }
            fact *= (2.0 * k - 1.0) * (2.0 * k);
            four *= 4.0;
            sum += pw * (2.0 * k * four * b / fact);
        }
        sum
    } else {
        let s = sin_pi(x / PI);
        cot_pi(x / PI) - x / (s * s)
    }
}

impl SinhSquareModel {
    pub fn new(alpha: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha.abs() < 1.0) {
            return Err(Error::Domain(format!("sinh model needs |alpha| < 1, got {alpha}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Domain(format!("sinh model needs sigma >= 0, got {sigma}")));
        }
        if !mu.is_finite() {
            return Err(Error::Domain("sinh model needs a finite mu".into()));
        }
        let gamma_c = xcotx(Cx::new(PI * alpha, 0.0)).re;
        let tail = if alpha.abs() < 1e-4 {
            let a = PI * PI * alpha * alpha;
            -PI * PI * alpha / 3.0 + 4.0 * a * PI * PI * alpha / 45.0
        } else {
            gamma_c * (gamma_c - 1.0) / alpha
        };
        let rho_c = 4.0 * PI * PI * alpha + 4.0 * tail - mu;
        Ok(Self { alpha, sigma, mu, gamma_c, rho_c })
    }

    /// Poles of Ψ(iζ) sit at α+n, n ≠ 0.
    pub(crate) fn anchor(&self, idx: i64) -> f64 {
        self.alpha + idx as f64
    }

    fn smooth(&self, zeta: Cx) -> Cx {
        -0.5 * self.sigma * self.sigma * zeta * zeta - self.rho_c * zeta - 4.0 * self.gamma_c
    }

    /// Ψ(iζ) with ζ = α + n + ω.
    pub(crate) fn g(&self, n: i64, om: Cx) -> Cx {
        let zeta = self.anchor(n) + om;
        let per = if n == 0 {
            4.0 * xcotx(om * PI)
        } else {
            4.0 * PI * (n as f64 + om) * cot_pi(om)
        };
        self.smooth(zeta) + per
    }

    pub(crate) fn dg(&self, n: i64, om: Cx) -> Cx {
        let zeta = self.anchor(n) + om;
        let per = if n == 0 {
            4.0 * PI * xcotx_prime(om * PI)
        } else {
            let s = sin_pi(om);
            4.0 * PI * cot_pi(om) - 4.0 * PI * PI * (n as f64 + om) / (s * s)
        };
        -self.sigma * self.sigma * zeta - self.rho_c + per
    }

    pub(crate) fn locate(&self, zeta: Cx) -> (i64, Cx) {
        let w = zeta - self.alpha;
        if w.re.abs() < 1.0 {
            return (0, w);
        }
        let n = w.re.round();
        (n as i64, w - n)
    }

    pub(crate) fn pole_distance(&self, n: i64, om: Cx) -> f64 {
        let mut d = f64::INFINITY;
        if n != 0 {
            d = om.norm();
        }
        if n != -1 {
            d = d.min((om - 1.0).norm());
        }
        if n != 1 {
            d = d.min((om + 1.0).norm());
        }
        d
    }
}
