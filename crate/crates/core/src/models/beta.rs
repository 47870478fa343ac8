use super::Cx;
use crate::error::{Error, Result};
use crate::specfun::{cot_pi, gamma_real, lgamma_diff, psi, sin_pi, trigamma, trigamma_real};
use serde::Serialize;
use std::f64::consts::PI;

/// Ten-parameter family with Lévy density
/// c₁e^{−α₁β₁x}/(1−e^{−β₁x})^{λ₁} for x>0 and
/// c₂e^{α₂β₂x}/(1−e^{β₂x})^{λ₂} for x<0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaFamilyModel {
    pub c1: f64,
    pub c2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma: f64,
    pub mu: f64,
    pub gamma_c: f64,
    pub rho_c: f64,
    #[serde(skip)]
    pub(crate) s1: Side,
    #[serde(skip)]
    pub(crate) s2: Side,
}

pub(crate) const LAMBDA_DISPATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Generic,
    One,
    Two,
}

fn kind_of(lambda: f64) -> Kind {
    if (lambda - 1.0).abs() < LAMBDA_DISPATCH_TOL {
        Kind::One
    } else if (lambda - 2.0).abs() < LAMBDA_DISPATCH_TOL {
        Kind::Two
    } else {
        Kind::Generic
    }
}

/// Argument x of the beta/digamma terms. Near a pole it is carried as
/// x = −k − ω so that the reflection formulas see ω exactly.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Arg {
    Plain(Cx),
    Near { k: f64, om: Cx },
}

impl Arg {
    fn normalized(self) -> Arg {
        match self {
            Arg::Plain(x) if x.re < 0.5 => {
                let k = (-x.re).round().max(0.0);
                Arg::Near { k, om: -x - k }
            }
            a => a,
        }
    }

    fn value(self) -> Cx {
        match self {
            Arg::Plain(x) => x,
            Arg::Near { k, om } => -om - k,
        }
    }

    /// Γ(x)/Γ(x+v).
    fn gamma_ratio(self, v: f64) -> Cx {
        let r = self.gamma_ratio_raw(v);
        // real x: drop the rounding residue of e^{iπk}
        if self.value().im == 0.0 { Cx::new(r.re, 0.0) } else { r }
    }

    fn gamma_ratio_raw(self, v: f64) -> Cx {
        match self {
            Arg::Plain(x) => (-lgamma_diff(x, Cx::new(v, 0.0))).exp(),
            Arg::Near { k, om } => {
                let z = om + 1.0 + k;
                -sin_pi(v - om) / sin_pi(om) * lgamma_diff(z, Cx::new(-v, 0.0)).exp()
            }
        }
    }

    fn digamma(self) -> Cx {
        match self {
            Arg::Plain(x) => psi(x),
            Arg::Near { k, om } => psi(om + 1.0 + k) + PI * cot_pi(om),
        }
    }

    fn digamma_shift(self, v: f64) -> Cx {
        match self {
            Arg::Plain(x) => psi(x + v),
            Arg::Near { k, om } => psi(om + 1.0 + k - v) - PI * cot_pi(v - om),
        }
    }

    fn trigamma(self) -> Cx {
        match self {
            Arg::Plain(x) => trigamma(x),
            Arg::Near { k, om } => {
                let s = sin_pi(om);
                PI * PI / (s * s) - trigamma(om + 1.0 + k)
            }
        }
    }

    fn pole_distance(self) -> f64 {
        match self {
            Arg::Plain(_) => f64::INFINITY,
            Arg::Near { om, .. } => om.norm(),
        }
    }
}

/// One half of the jump measure together with its cached constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Side {
    c: f64,
    alpha: f64,
    beta: f64,
    kind: Kind,
    v: f64,
    gv: f64,
    ba: f64,
    dpa: f64,
    psi_a: f64,
    tri_a: f64,
}

impl Side {
    fn new(c: f64, alpha: f64, beta: f64, lambda: f64) -> Side {
        let kind = kind_of(lambda);
        let v = 1.0 - lambda;
        let a = Cx::new(alpha, 0.0);
        let psi_a = psi(a).re;
        let tri_a = trigamma_real(alpha);
        let (gv, ba, dpa) = if kind == Kind::Generic {
            let gv = gamma_real(v);
            let ba = gv * Arg::Plain(a).gamma_ratio(v).re;
            (gv, ba, psi(a + v).re - psi_a)
        } else {
            (0.0, 0.0, 0.0)
        };
        Side { c, alpha, beta, kind, v, gv, ba, dpa, psi_a, tri_a }
    }

    /// Constant and linear coefficients of J: (γ-part, ρ-part).
    fn constants(&self) -> (f64, f64) {
        let (c, b, a) = (self.c, self.beta, self.alpha);
        match self.kind {
            Kind::Generic => (c / b * self.ba, c / (b * b) * self.ba * self.dpa),
            Kind::One => (-c / b * self.psi_a, c / (b * b) * self.tri_a),
            Kind::Two => (
                -c / b * (1.0 - a) * self.psi_a,
                c / (b * b) * ((1.0 - a) * self.tri_a - self.psi_a),
            ),
        }
    }

    /// J and dJ/dt at x = α − t.
    pub(crate) fn eval(&self, x: Arg) -> (Cx, Cx) {
        if self.c == 0.0 {
            return (Cx::new(0.0, 0.0), Cx::new(0.0, 0.0));
        }
        let x = x.normalized();
        let t = self.alpha - x.value();
        let (a, b) = (self.alpha, self.beta);
        let (j, dj) = match self.kind {
            Kind::Generic => {
                let bx = x.gamma_ratio(self.v) * self.gv;
                let j = -(bx - self.ba) + t * self.ba * self.dpa;
                let dj = bx * (x.digamma() - x.digamma_shift(self.v)) + self.ba * self.dpa;
                (j, dj)
            }
            Kind::One => {
                let j = x.digamma() - self.psi_a + t * self.tri_a;
                (j, self.tri_a - x.trigamma())
            }
            Kind::Two => {
                let d = x.digamma() - self.psi_a;
                let j = (1.0 - a + t) * d + t * (1.0 - a) * self.tri_a;
                let dj = d - (1.0 - a + t) * x.trigamma() + (1.0 - a) * self.tri_a;
                (j, dj)
            }
        };
        (j * (self.c / b), dj * (self.c / b))
    }
}

impl BetaFamilyModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c1: f64,
        c2: f64,
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
        lambda1: f64,
        lambda2: f64,
        sigma: f64,
        mu: f64,
    ) -> Result<Self> {
        let all = [c1, c2, alpha1, alpha2, beta1, beta2, lambda1, lambda2, sigma, mu];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("beta model parameters must be finite".into()));
        }
        let bad = |name: &str, v: f64| Err(Error::Domain(format!("beta model: {name}={v} violates its range")));
        if c1 < 0.0 {
            return bad("c1 >= 0: c1", c1);
        }
        if c2 < 0.0 {
            return bad("c2 >= 0: c2", c2);
        }
        if alpha1 <= 0.0 {
            return bad("alpha1 > 0: alpha1", alpha1);
        }
        if alpha2 <= 0.0 {
            return bad("alpha2 > 0: alpha2", alpha2);
        }
        if beta1 <= 0.0 {
            return bad("beta1 > 0: beta1", beta1);
        }
        if beta2 <= 0.0 {
            return bad("beta2 > 0: beta2", beta2);
        }
        if !(lambda1 > 0.0 && lambda1 < 3.0) {
            return bad("lambda1 in (0,3): lambda1", lambda1);
        }
        if !(lambda2 > 0.0 && lambda2 < 3.0) {
            return bad("lambda2 in (0,3): lambda2", lambda2);
        }
        if sigma < 0.0 {
            return bad("sigma >= 0: sigma", sigma);
        }
        if c1 == 0.0 && c2 == 0.0 && sigma == 0.0 {
            return Err(Error::Domain("beta model: one of c1, c2, sigma must be positive".into()));
        }
        let s1 = Side::new(c1, alpha1, beta1, lambda1);
        let s2 = Side::new(c2, alpha2, beta2, lambda2);
        let (g1, r1) = s1.constants();
        let (g2, r2) = s2.constants();
        Ok(BetaFamilyModel {
            c1, c2, alpha1, alpha2, beta1, beta2, lambda1, lambda2, sigma, mu,
            gamma_c: g1 + g2,
            rho_c: r1 - r2 - mu,
            s1,
            s2,
        })
    }

    pub fn mirror(&self) -> BetaFamilyModel {
        BetaFamilyModel::new(
            self.c2, self.c1, self.alpha2, self.alpha1, self.beta2, self.beta1,
            self.lambda2, self.lambda1, self.sigma, -self.mu,
        )
        .expect("mirror of a valid model is valid")
    }

    /// Anchors: 0, β₂(α₂+n−1) for n ≥ 1, −β₁(α₁+|n|−1) for n ≤ −1.
    pub(crate) fn anchor(&self, idx: i64) -> f64 {
        match idx {
            0 => 0.0,
            n if n > 0 => self.beta2 * (self.alpha2 + (n - 1) as f64),
            n => -self.beta1 * (self.alpha1 + (-n - 1) as f64),
        }
    }

    fn args(&self, idx: i64, off: Cx) -> (Arg, Arg) {
        let zeta = self.anchor(idx) + off;
        let x1 = if idx < 0 {
            Arg::Near { k: (-idx - 1) as f64, om: -off / self.beta1 }
        } else {
            Arg::Plain(zeta / self.beta1 + self.alpha1)
        };
        let x2 = if idx > 0 {
            Arg::Near { k: (idx - 1) as f64, om: off / self.beta2 }
        } else {
            Arg::Plain(-zeta / self.beta2 + self.alpha2)
        };
        (x1, x2)
    }

    /// Ψ(iζ) and dΨ(iζ)/dζ with ζ = anchor(idx) + off.
    pub(crate) fn g_dg(&self, idx: i64, off: Cx) -> (Cx, Cx) {
        let zeta = self.anchor(idx) + off;
        let (x1, x2) = self.args(idx, off);
        let (j1, dj1) = self.s1.eval(x1);
        let (j2, dj2) = self.s2.eval(x2);
        let s2 = self.sigma * self.sigma;
        let g = -0.5 * s2 * zeta * zeta + self.mu * zeta + j1 + j2;
        let dg = -s2 * zeta + self.mu - dj1 / self.beta1 + dj2 / self.beta2;
        (g, dg)
    }

    /// Distance to the nearest pole, in units of the local spacing.
    pub(crate) fn pole_distance(&self, idx: i64, off: Cx) -> f64 {
        let (x1, x2) = self.args(idx, off);
        let d1 = if self.c1 > 0.0 { x1.normalized().pole_distance() } else { f64::INFINITY };
        let d2 = if self.c2 > 0.0 { x2.normalized().pole_distance() } else { f64::INFINITY };
        d1.min(d2)
    }
}
