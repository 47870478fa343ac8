//! Law of the supremum: exponential series at exponential times, closed
//! forms for the special cases, and cosine-transform inversion in t.

mod inversion;

pub use inversion::{sup_density_fixed_t, FixedTDensity, InversionParams};

use crate::error::{Error, Result};
use crate::models::ProcessModel;
use crate::roots::RootGrid;
use crate::specfun::{gauss_2f1, hurwitz_zeta, lgamma};
use crate::wh_factors::{atom_probability, sech_atom, sinh_q4_eta, FactorProduct, FactorSide};
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest tail uncertainty accepted in ln c_k.
const COEFF_TOL: f64 = 1e-8;
/// Largest number of exponents `sup_density_auto` goes to.
pub const MAX_TERMS: usize = 4096;

/// d/dx P(S_τ ≤ x) = −Σ c_k ζ_k e^{ζ_k x} for x > 0, plus the atom at 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupDensity {
    pub atom: f64,
    /// ζ₀⁻ first, then ζ_{−1}, ζ_{−2}, ...; all negative.
    pub exponents: Vec<f64>,
    /// c_k⁻, in the order of `exponents`.
    pub coefficients: Vec<f64>,
    /// Index of the last exponent kept.
    pub k: usize,
    /// Σ of the coefficients past k, from a power law fitted to the last
    /// periods of the lattice.
    pub tail_mass: f64,
    pub tail_error: f64,
}

/// (root, coefficient) pairs of the supremum series in the positive
/// coordinates of the factor's side: c_n = Res_{s=−ζ_n} F(s)/ζ_n.
pub(crate) fn series_terms(f: &FactorProduct, k: usize) -> Result<Vec<(Cx, Cx)>> {
    (0..=k)
        .into_par_iter()
        .map(|n| {
            let z = f.zeta(n)?;
            let v = f.log_product(-z, Some(n))?;
            if v.error > COEFF_TOL {
                return Err(Error::Accuracy(format!("coefficient {n}: tail uncertain by {:.2e}", v.error)));
            }
            Ok((z, v.value.exp()))
        })
        .collect()
}

/// The series of S_τ at an exponential time from a real-q grid, with k
/// exponents past ζ₀⁻ (rounded up to whole periods of the root lattice).
pub fn sup_density_expq(model: &ProcessModel, grid: &RootGrid, k: usize) -> Result<SupDensity> {
    if grid.model != *model {
        return Err(Error::Domain("the root grid belongs to a different model".into()));
    }
    let f = FactorProduct::new(grid, FactorSide::Plus);
    let w = f.period();
    let k = k.max(w).div_ceil(w) * w;
    let terms = series_terms(&f, k)?;
    let mut exponents = Vec::with_capacity(k + 1);
    let mut coefficients = Vec::with_capacity(k + 1);
    for (n, (z, c)) in terms.iter().enumerate() {
        if c.im.abs() > 1e-9 * c.norm().max(1e-300) {
            return Err(Error::Accuracy(format!("coefficient {n} is not real: {c}")));
        }
        exponents.push(-z.re);
        coefficients.push(c.re);
    }
    let groups: Vec<f64> = coefficients[1..].chunks(w).map(|g| g.iter().sum()).collect();
    let (tail_mass, tail_error) = power_tail(&groups);
    Ok(SupDensity { atom: atom_probability(model, grid)?, exponents, coefficients, k, tail_mass, tail_error })
}

/// Σ_{j>J} g_j for g_j ≈ A j^{−p}, with p read off g_{J/2} and g_J, and the
/// disagreement with the same fit made at 3J/4 as the error.
fn power_tail(g: &[f64]) -> (f64, f64) {
    let total = |hi: usize| -> Option<f64> {
        let lo = hi / 2;
        let (a, b) = (g[lo - 1], g[hi - 1]);
        if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
            return None;
        }
        let p = (a / b).ln() / (hi as f64 / lo as f64).ln();
        if !(p > 1.05) {
            return None;
        }
        let head: f64 = g[..hi].iter().sum();
        Some(head + b * (hi as f64).powf(p) * hurwitz_zeta(p, Cx::new(hi as f64 + 1.0, 0.0)).re)
    };
    let j = g.len();
    if j < 8 {
        return (0.0, f64::INFINITY);
    }
    match (total(j), total(3 * j / 4)) {
        (Some(t1), Some(t2)) => (t1 - g.iter().sum::<f64>(), (t1 - t2).abs()),
        _ => (0.0, f64::INFINITY),
    }
}

/// `sup_density_expq` with the number of exponents doubled from 100 until
/// the mass past the last one is known to `tol` (or MAX_TERMS is reached).
pub fn sup_density_auto(model: &ProcessModel, grid: &RootGrid, tol: f64) -> Result<SupDensity> {
    let mut k = 100;
    loop {
        let d = sup_density_expq(model, grid, k)?;
        if d.tail_error <= tol || 2 * k > MAX_TERMS {
            return Ok(d);
        }
        k *= 2;
    }
}

impl SupDensity {
    /// Density at x > 0.
    pub fn density(&self, x: f64) -> f64 {
        self.density_with_error(x).0
    }

    /// Density and a bound on the dropped terms, treating them as a
    /// geometric continuation of the last one.
    pub fn density_with_error(&self, x: f64) -> (f64, f64) {
        let mut s = 0.0;
        for (z, c) in self.exponents.iter().zip(&self.coefficients).rev() {
            s -= c * z * (z * x).exp();
        }
        let n = self.exponents.len();
        let err = if n >= 3 {
            let (zl, cl) = (self.exponents[n - 1], self.coefficients[n - 1]);
            let half = n / 2;
            let gap = (self.exponents[half] - zl) / (n - 1 - half) as f64;
            let r = (-gap * x).exp();
            (cl * zl * (zl * x).exp()).abs() * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        (s, err)
    }

    /// P(S_τ ≤ x). The estimated mass past the last exponent is released
    /// at the rate of that exponent, so cdf(0) = atom and cdf(∞) = mass().
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut s = self.atom;
        for (z, c) in self.exponents.iter().zip(&self.coefficients).rev() {
            s -= c * (z * x).exp_m1();
        }
        let zl = *self.exponents.last().unwrap();
        s - self.tail_mass * (zl * x).exp_m1()
    }

    /// atom + ∫₀^∞ density, integrating each exponential exactly.
    pub fn mass(&self) -> f64 {
        self.atom + self.coefficients.iter().sum::<f64>() + self.tail_mass
    }

    pub fn to_csv(&self, xs: &[f64]) -> String {
        let mut s = String::from("x,density,error_estimate\n");
        for &x in xs {
            let (d, e) = self.density_with_error(x);
            s.push_str(&format!("{x:.16e},{d:.16e},{e:.16e}\n"));
        }
        s
    }
}

pub fn sup_cdf_expq(dens: &SupDensity, x: f64) -> f64 {
    dens.cdf(x)
}

/// Density of S_τ for the sech model: two ₂F₁ series in e^{−4x}.
pub fn sup_density_closed_sech(alpha: f64, q: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("need x > 0, got {x}")));
    }
    let p0 = sech_atom(alpha, q)?;
    let eta = crate::models::SechPoissonModel::new(alpha)?.eta(q);
    let g = |v: f64| lgamma(Cx::new(v, 0.0)).re;
    let y = (-4.0 * x).exp();
    let first = (g(0.25 * (1.0 + eta)) + g(0.25 * (3.0 + eta)) - g(0.5 * eta)).exp()
        * ((alpha - eta) * x).exp()
        * gauss_2f1(0.25 * (1.0 + eta), 0.25 * (3.0 + eta), 0.5 * eta, y)?;
    let second = (g(0.25 * (5.0 - eta)) + g(0.25 * (7.0 - eta)) - g(0.5 * (4.0 - eta))).exp()
        * ((alpha - 4.0 + eta) * x).exp()
        * gauss_2f1(0.25 * (5.0 - eta), 0.25 * (7.0 - eta), 0.5 * (4.0 - eta), y)?;
    Ok(2.0 * p0 / PI / (0.5 * PI * eta).tan() * (first - second))
}

/// Density of S_τ(4) for the sinh model with σ = α = 0:
/// sin(πη)/π (e^x − 1)^{−η}.
pub fn sup_density_closed_sinh_q4(mu: f64, x: f64) -> f64 {
    let eta = sinh_q4_eta(mu);
    (PI * eta).sin() / PI * x.exp_m1().powf(-eta)
}

#[cfg(test)]
mod tests;
