//! The three process families and their characteristic exponents.
//!
//! Internally Ψ is evaluated on the imaginary axis, z = iζ, with ζ split
//! as `anchor(idx) + off` where the anchor is a pole (or a regular point)
//! of ζ ↦ Ψ(iζ). Carrying the offset separately keeps roots that hug a
//! pole resolvable to full relative precision.

pub(crate) mod beta;
mod lk;
mod sech;
mod sinh;

pub use beta::BetaFamilyModel;
pub use lk::psi_lk_quadrature;
pub use sech::SechPoissonModel;
pub use sinh::SinhSquareModel;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

pub(crate) type Cx = Complex64;

pub(crate) const POLE_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProcessModel {
    SechPoisson(SechPoissonModel),
    SinhSquare(SinhSquareModel),
    BetaFamily(BetaFamilyModel),
}

impl From<SechPoissonModel> for ProcessModel {
    fn from(m: SechPoissonModel) -> Self {
        ProcessModel::SechPoisson(m)
    }
}

impl From<SinhSquareModel> for ProcessModel {
    fn from(m: SinhSquareModel) -> Self {
        ProcessModel::SinhSquare(m)
    }
}

impl From<BetaFamilyModel> for ProcessModel {
    fn from(m: BetaFamilyModel) -> Self {
        ProcessModel::BetaFamily(m)
    }
}

fn finite(z: Cx) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {z}")))
    }
}

impl ProcessModel {
    pub fn sech(alpha: f64) -> Result<Self> {
        SechPoissonModel::new(alpha).map(Into::into)
    }

    pub fn sinh(alpha: f64, sigma: f64, mu: f64) -> Result<Self> {
        SinhSquareModel::new(alpha, sigma, mu).map(Into::into)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            ProcessModel::SechPoisson(_) => "sech",
            ProcessModel::SinhSquare(_) => "sinh",
            ProcessModel::BetaFamily(_) => "beta",
        }
    }

    /// The model of −X, whose exponent is z ↦ Ψ(−z).
    pub fn mirror(&self) -> ProcessModel {
        match self {
            ProcessModel::SechPoisson(m) => SechPoissonModel::new(-m.alpha).unwrap().into(),
            ProcessModel::SinhSquare(m) => SinhSquareModel::new(-m.alpha, m.sigma, -m.mu).unwrap().into(),
            ProcessModel::BetaFamily(m) => m.mirror().into(),
        }
    }

    pub(crate) fn anchor(&self, idx: i64) -> f64 {
        match self {
            ProcessModel::SechPoisson(m) => m.anchor(idx),
            ProcessModel::SinhSquare(m) => m.anchor(idx),
            ProcessModel::BetaFamily(m) => m.anchor(idx),
        }
    }

    /// Ψ(iζ) at ζ = anchor(idx) + off.
    pub(crate) fn g(&self, idx: i64, off: Cx) -> Cx {
        match self {
            ProcessModel::SechPoisson(m) => m.g(off),
            ProcessModel::SinhSquare(m) => m.g(idx, off),
            ProcessModel::BetaFamily(m) => m.g_dg(idx, off).0,
        }
    }

    /// (Ψ(iζ), dΨ(iζ)/dζ) at ζ = anchor(idx) + off.
    pub(crate) fn g_dg(&self, idx: i64, off: Cx) -> (Cx, Cx) {
        match self {
            ProcessModel::SechPoisson(m) => (m.g(off), m.dg(off)),
            ProcessModel::SinhSquare(m) => (m.g(idx, off), m.dg(idx, off)),
            ProcessModel::BetaFamily(m) => m.g_dg(idx, off),
        }
    }

    /// Anchored coordinates of a point ζ.
    pub(crate) fn locate(&self, zeta: Cx) -> (i64, Cx) {
        match self {
            ProcessModel::SechPoisson(m) => m.locate(zeta),
            ProcessModel::SinhSquare(m) => m.locate(zeta),
            ProcessModel::BetaFamily(_) => (0, zeta),
        }
    }

    fn pole_distance(&self, idx: i64, off: Cx) -> f64 {
        match self {
            ProcessModel::SechPoisson(m) => m.pole_distance(off) / 2.0,
            ProcessModel::SinhSquare(m) => m.pole_distance(idx, off),
            ProcessModel::BetaFamily(m) => m.pole_distance(idx, off),
        }
    }

    fn checked(&self, z: Cx) -> Result<(i64, Cx)> {
        finite(z)?;
        let (idx, off) = self.locate(Cx::new(z.im, -z.re));
        if self.pole_distance(idx, off) < POLE_GUARD {
            return Err(Error::Pole(format!("Ψ has a pole at z≈{z}")));
        }
        Ok((idx, off))
    }

    /// Characteristic exponent Ψ(z), E e^{izX₁} = e^{−Ψ(z)}.
    pub fn psi(&self, z: Cx) -> Result<Cx> {
        let (idx, off) = self.checked(z)?;
        Ok(self.g(idx, off))
    }

    /// Ψ′(z).
    pub fn psi_prime(&self, z: Cx) -> Result<Cx> {
        let (idx, off) = self.checked(z)?;
        // ζ = −iz, so dΨ/dz = −i dΨ(iζ)/dζ
        Ok(-Cx::i() * self.g_dg(idx, off).1)
    }

    /// E X₁ = dΨ(iζ)/dζ at ζ = 0.
    pub fn mean(&self) -> f64 {
        self.g_dg(0, Cx::new(0.0, 0.0)).1.re
    }

    /// Whether q = 0 is admissible (E X₁ < 0).
    pub fn allows_q_zero(&self) -> bool {
        match self {
            ProcessModel::SechPoisson(m) => m.alpha < 0.0,
            _ => self.mean() < 0.0,
        }
    }
}

/// Free-function form of [`ProcessModel::psi`].
pub fn psi(model: &ProcessModel, z: Cx) -> Result<Cx> {
    model.psi(z)
}

/// Free-function form of [`ProcessModel::psi_prime`].
pub fn psi_prime(model: &ProcessModel, z: Cx) -> Result<Cx> {
    model.psi_prime(z)
}

#[cfg(test)]
mod tests;
