//! Oracles kept apart from the code they check: Monte Carlo for the sech
//! model, plain long products, a bisection root finder, and a report that
//! cross-checks the modules against each other.

mod laplace;
mod mc;

pub use laplace::{laplace_check, LaplaceCheck};
pub use mc::{mc_sup_sech, EmpiricalCdf, Horizon};

use crate::distributions::sup_density_auto;
use crate::error::{Error, Result};
use crate::models::{psi_lk_quadrature, ProcessModel};
use crate::roots::{localize, omega_direct, omega_recurrence, partner, solve_real_q, RootGrid, RootId};
use crate::wh_factors::{phi_plus_closed_sech, phi_plus_closed_sinh_q4, FactorProduct, FactorSide};
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// |φ⁺φ⁻(q+Ψ)/q − 1|.
pub const TOL_FACTORIZATION: f64 = 1e-7;
/// |Ψ − Ψ_LK| / (1 + |Ψ|).
pub const TOL_PSI: f64 = 1e-7;
/// Relative, Ω_m direct vs recurrence.
pub const TOL_OMEGA: f64 = 1e-6;
/// Relative, closed form vs product.
pub const TOL_CLOSED: f64 = 1e-8;
pub const TOL_NORMALIZATION: f64 = 1e-6;
/// Residual bound per unit of (1 + q).
pub const TOL_RESIDUAL: f64 = 1e-10;

/// ln F(s) summed term by term from the roots of one side and their
/// partner poles, with no tail.
pub struct NaiveProduct {
    /// (ζ − p, p, ζ) per root; p = None for an unpaired root.
    terms: Vec<(Cx, Option<Cx>, Cx)>,
    side: FactorSide,
}

impl NaiveProduct {
    /// Roots 0..=n of the chosen side (solved past the grid as needed).
    pub fn new(grid: &RootGrid, side: FactorSide, n: usize) -> Result<NaiveProduct> {
        let half = match side {
            FactorSide::Minus => &grid.pos,
            FactorSide::Plus => &grid.neg,
        };
        let m = &half.model;
        let terms = (0..=n)
            .into_par_iter()
            .map(|k| {
                let r = half.root(k)?;
                let z = r.zeta(m);
                Ok(match partner(m, k) {
                    Some((idx, off)) => {
                        let p = m.anchor(idx) + off;
                        // ζ − p from the local offsets, without cancellation
                        let d = r.off - off + (m.anchor(r.idx) - m.anchor(idx));
                        (d, Some(Cx::new(p, 0.0)), z)
                    }
                    None => (Cx::new(0.0, 0.0), None, z),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NaiveProduct { terms, side })
    }

    /// φ(z) from the partial product.
    pub fn phi(&self, z: Cx) -> Cx {
        let s = match self.side {
            FactorSide::Minus => Cx::new(0.0, 1.0) * z,
            FactorSide::Plus => Cx::new(0.0, -1.0) * z,
        };
        // (1+s/p)/(1+s/ζ) = 1 + s(ζ−p)/(p(ζ+s))
        let log: Cx = self
            .terms
            .par_iter()
            .with_min_len(4096)
            .map(|(d, p, zeta)| match p {
                Some(p) => ln1p(s * d / (p * (zeta + s))),
                None => -ln1p(s / zeta),
            })
            .sum();
        log.exp()
    }
}

/// ln(1 + w) with its own short series near 0.
fn ln1p(w: Cx) -> Cx {
    if w.norm() < 1e-3 {
        let mut term = w;
        let mut sum = w;
        for k in 2..12 {
            term *= -w;
            sum += term / k as f64;
        }
        sum
    } else {
        (w + 1.0).ln()
    }
}

/// The plain partial product of the chosen factor at z, to root n.
pub fn naive_factor_product(grid: &RootGrid, side: FactorSide, z: Cx, n: usize) -> Result<Cx> {
    if n > 10_000_000 {
        return Err(Error::Domain(format!("naive products stop at 10^7 terms, asked for {n}")));
    }
    Ok(NaiveProduct::new(grid, side, n)?.phi(z))
}

/// Roots of q + Ψ(iζ) in the localization intervals by bisection alone,
/// in `localize` order.
pub fn bisection_roots(model: &ProcessModel, q: f64, n: usize) -> Result<Vec<f64>> {
    let ivs = localize(model, q, n)?;
    let f = |z: f64| -> Result<f64> { Ok(q + model.psi(Cx::new(0.0, z))?.re) };
    ivs.par_iter()
        .map(|iv| {
            let (mut lo, mut hi) = (iv.lo, iv.hi);
            let eps = 1e-9 * (hi - lo);
            let f_lo = f(lo + eps)?;
            if f_lo == 0.0 {
                return Ok(lo + eps);
            }
            if f_lo.signum() == f(hi - eps)?.signum() {
                return Err(Error::Convergence(format!("no sign change for root {} in ({lo}, {hi})", iv.id)));
            }
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    return Ok(mid);
                }
                let v = f(mid)?;
                if v == 0.0 {
                    return Ok(mid);
                }
                if v.signum() == f_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub q: Option<f64>,
    /// The deviation measured.
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    /// Set when the check could not be computed.
    pub error: Option<String>,
}

impl Check {
    fn new(name: &str, q: Option<f64>, v: Result<f64>, tol: f64) -> Check {
        match v {
            Ok(value) => Check { name: name.into(), q, value, tol, pass: value <= tol, error: None },
            Err(e) => Check { name: name.into(), q, value: f64::NAN, tol, pass: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub model: ProcessModel,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportOptions {
    /// Roots per side in the grids.
    pub n: usize,
    /// Shift one root of every grid before the factor checks.
    pub perturb: Option<(RootId, f64)>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { n: 100, perturb: None }
    }
}

pub fn consistency_report(model: &ProcessModel, q_list: &[f64], z_grid: &[Cx]) -> Report {
    consistency_report_with(model, q_list, z_grid, &ReportOptions::default())
}

fn max_over<F: Fn(Cx) -> Result<f64> + Sync>(zs: &[Cx], f: F) -> Result<f64> {
    Ok(zs.par_iter().map(|z| f(*z)).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max))
}

fn rel(a: Cx, b: Cx) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn consistency_report_with(model: &ProcessModel, q_list: &[f64], z_grid: &[Cx], opt: &ReportOptions) -> Report {
    let mut checks = Vec::new();
    if !q_list.is_empty() {
        let real: Vec<Cx> = z_grid.iter().copied().filter(|z| z.im == 0.0).collect();
        let v = max_over(&real, |z| {
            let a = model.psi(z)?;
            Ok((a - psi_lk_quadrature(model, z)?).norm() / (1.0 + a.norm()))
        });
        checks.push(Check::new("psi_vs_levy_khintchine", None, v, TOL_PSI));
    }
    for &q in q_list {
        let grid = match solve_real_q(model, q, opt.n) {
            Ok(g) => g,
            Err(e) => {
                checks.push(Check::new("roots", Some(q), Err(e), TOL_RESIDUAL * (1.0 + q)));
                continue;
            }
        };
        let worst = grid.residuals.iter().copied().fold(0.0, f64::max);
        checks.push(Check::new("root_residuals", Some(q), Ok(worst), TOL_RESIDUAL * (1.0 + q)));
        let grid = match opt.perturb {
            Some((id, by)) => grid.perturbed(id, by),
            None => grid,
        };
        let plus = FactorProduct::new(&grid, FactorSide::Plus);
        let minus = FactorProduct::new(&grid, FactorSide::Minus);
        let v = max_over(z_grid, |z| {
            let lhs = plus.phi(z)? * minus.phi(z)? * (model.psi(z)? + q) / q;
            Ok((lhs - 1.0).norm())
        });
        checks.push(Check::new("factorization", Some(q), v, TOL_FACTORIZATION));
        match model {
            ProcessModel::SechPoisson(m) => {
                let eta = m.eta(q);
                let zs: Vec<Cx> = z_grid.iter().copied().filter(|z| z.im > m.alpha - eta).collect();
                let v = max_over(&zs, |z| Ok(rel(plus.phi(z)?, phi_plus_closed_sech(m.alpha, q, z)?)));
                checks.push(Check::new("closed_form_sech", Some(q), v, TOL_CLOSED));
            }
            ProcessModel::SinhSquare(m) if m.alpha == 0.0 && m.sigma == 0.0 && m.mu == 4.0 * PI && q == 4.0 => {
                let zs: Vec<Cx> = z_grid.iter().copied().filter(|z| z.im >= 0.0).collect();
                let v = max_over(&zs, |z| Ok(rel(plus.phi(z)?, phi_plus_closed_sinh_q4(m.mu, z)?)));
                checks.push(Check::new("closed_form_sinh_q4", Some(q), v, TOL_CLOSED));
            }
            ProcessModel::SinhSquare(m) if m.alpha != 0.0 => {
                let v = omega_recurrence(model, q, 5).and_then(|rec| {
                    let mut worst: f64 = 0.0;
                    for (k, r) in rec.iter().enumerate() {
                        let d = omega_direct(&grid, model, k)?;
                        worst = worst.max((d - r).abs() / r.abs());
                    }
                    Ok(worst)
                });
                checks.push(Check::new("omega", Some(q), v, TOL_OMEGA));
            }
            _ => {}
        }
        let v = sup_density_auto(model, &grid, 1e-7).map(|d| (d.mass() - 1.0).abs());
        checks.push(Check::new("normalization", Some(q), v, TOL_NORMALIZATION));
    }
    let pass = checks.iter().all(|c| c.pass);
    Report { model: *model, checks, pass }
}

/// Monte Carlo against the series for the sech model at q: the atom in
/// binomial standard errors and the CDF at 20 quantiles in units of the
/// Kolmogorov standard error, both against 3.
pub fn mc_checks(alpha: f64, q: f64, n_samples: usize, seed: u64) -> Vec<Check> {
    let run = || -> Result<(f64, f64)> {
        let m = ProcessModel::sech(alpha)?;
        let e = mc_sup_sech(alpha, Horizon::ExpQ(q), n_samples, seed)?;
        let d = sup_density_auto(&m, &solve_real_q(&m, q, 100)?, 1e-8)?;
        let atom = (e.atom() - d.atom).abs() / e.binomial_se(d.atom);
        let mut worst: f64 = 0.0;
        for k in 1..=20 {
            let x = e.quantile(k as f64 / 21.0);
            worst = worst.max((e.cdf(x) - d.cdf(x)).abs());
        }
        Ok((atom, worst / e.kolmogorov_se()))
    };
    match run() {
        Ok((a, c)) => vec![Check::new("mc_atom_se", Some(q), Ok(a), 3.0), Check::new("mc_cdf_se", Some(q), Ok(c), 3.0)],
        Err(e) => vec![Check::new("mc_atom_se", Some(q), Err(e.clone()), 3.0), Check::new("mc_cdf_se", Some(q), Err(e), 3.0)],
    }
}

#[cfg(test)]
mod tests;
