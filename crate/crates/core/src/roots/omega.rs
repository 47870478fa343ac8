//! Sums of inverse powers of the roots, for the sinh⁻² model.

use super::asymptotics::{Expansion, Strand};
use super::series::Series;
use super::{HalfRoots, RootGrid};
use crate::error::{Error, Result};
use crate::models::{ProcessModel, SinhSquareModel};
use crate::specfun::{hurwitz_zeta, psi};
use num_complex::Complex64 as Cx;
use std::f64::consts::PI;

fn sinh_params(model: &ProcessModel) -> Result<&SinhSquareModel> {
    match model {
        ProcessModel::SinhSquare(m) if m.alpha != 0.0 => Ok(m),
        ProcessModel::SinhSquare(_) => Err(Error::Domain("inverse power sums need alpha != 0".into())),
        _ => Err(Error::Domain(format!("inverse power sums are defined for the sinh model, not {}", model.family_name()))),
    }
}

/// Coefficients d_i with ζ_k^{−s} = scale^{−s} Σ_i d_i (k+b)^{−s−i}, from a
/// strand whose corrections are integer powers.
pub(crate) fn power_coeffs(strand: &Strand, s: f64, len: usize) -> Vec<Cx> {
    // 1 + Σ c_j u^{p_j+1} with u = 1/(k+b)
    let mut x = Series::constant(Cx::new(0.0, 0.0), len);
    for (p, c) in &strand.terms {
        let e = (*p as usize) + 1;
        if e < len {
            x.0[e] += c;
        }
    }
    let mut bin = vec![Cx::new(1.0, 0.0); len];
    for k in 1..len {
        bin[k] = bin[k - 1] * ((-s - (k - 1) as f64) / k as f64);
    }
    x.compose(&bin).0
}

/// Smallest doubling of k0 at which the strand can be cut with a last kept
/// correction below tol·(K+b), with the cut strand.
pub(crate) fn settle(strand: &Strand, k0: usize, tol: f64) -> (usize, Strand) {
    let mut k = k0.max(8);
    loop {
        let y = k as f64 + strand.b;
        if let Some(s) = strand.truncated(y, tol) {
            return (k, s);
        }
        if k > 1 << 22 {
            return (k, strand.clone());
        }
        k *= 2;
    }
}

const TAIL_LEN: usize = 10;

/// Σ_{k>K} (y_k)^{-s-i} parts of one side, leaving out the harmonic i = 0 piece when s = 1.
fn side_tail(strand: &Strand, s: f64, k: usize) -> Cx {
    let d = power_coeffs(strand, s, TAIL_LEN);
    let x = Cx::new(k as f64 + 1.0 + strand.b, 0.0);
    let mut sum = Cx::new(0.0, 0.0);
    for (i, di) in d.iter().enumerate() {
        let p = s + i as f64;
        if p == 1.0 || di.norm() == 0.0 {
            continue;
        }
        sum += di * hurwitz_zeta(p, x);
    }
    sum * strand.scale.powf(-s)
}

fn strand(e: &Expansion) -> &Strand {
    &e.strands[0]
}

/// Ω_m from the roots: explicit sum up to the grid's N and beyond, then an
/// expansion-based tail.
pub fn omega_direct(grid: &RootGrid, model: &ProcessModel, m: usize) -> Result<f64> {
    let p = sinh_params(model)?;
    if grid.zeta0_plus == 0.0 || grid.zeta0_minus == 0.0 {
        return Err(Error::Domain("a zero root makes the inverse power sums diverge".into()));
    }
    let s = (m + 1) as i32;
    let (pos, neg): (&HalfRoots, &HalfRoots) = (&grid.pos, &grid.neg);
    let ep = pos.expansion.as_ref().map_err(|e| e.clone())?;
    let en = neg.expansion.as_ref().map_err(|e| e.clone())?;
    let k = settle(strand(ep), grid.n, 1e-15).0.max(settle(strand(en), grid.n, 1e-15).0);
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = p.alpha.powi(-s) + grid.zeta0_minus.powi(-s) + grid.zeta0_plus.powi(-s);
    // pair terms to limit cancellation when m = 0
    let mut acc = 0.0;
    for n in (1..=k).rev() {
        let zp = pos.zeta(n)?.re;
        let zn = neg.zeta(n)?.re;
        acc += zp.powi(-s) + sign * zn.powi(-s);
    }
    sum += acc;
    let mut tail = side_tail(strand(ep), s as f64, k) + side_tail(strand(en), s as f64, k) * sign;
    if s == 1 {
        // Σ_{k>K} 1/(k+b) − 1/(k+b′) = ψ(K+1+b′) − ψ(K+1+b)
        let (bp, bn) = (strand(ep).b, strand(en).b);
        let kf = k as f64 + 1.0;
        tail += psi(Cx::new(kf + bn, 0.0)) - psi(Cx::new(kf + bp, 0.0));
    }
    Ok(sum + tail.re)
}

/// Maclaurin coefficients of the entire function whose zeros are α and the roots.
fn b_coeffs(m: &SinhSquareModel, q: f64, len: usize) -> Vec<f64> {
    let (al, s2, g, r) = (m.alpha, m.sigma * m.sigma, m.gamma_c, m.rho_c);
    let mut fact = 1.0;
    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        if j > 0 {
            fact *= j as f64;
        }
        let n = (j / 2) as f64;
        let v = if j % 2 == 0 {
            let sg = if (j / 2) % 2 == 1 { 1.0 } else { -1.0 };
            sg * PI.powi(j as i32 - 1) / fact
                * (n * (2.0 * n - 1.0) * al * s2 + PI * PI * al * (q + 8.0 * n) - 2.0 * n * g * r)
        } else {
            let sg = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sg * PI.powi(j as i32 - 1) / fact
                * (n * (2.0 * n + 1.0) * g * s2 / PI - PI * (4.0 * PI * PI * al * al + 4.0 * g * g - g * q)
                    + PI * (2.0 * n + 1.0) * (4.0 * g + al * r))
        };
        out.push(v);
    }
    out
}

/// Ω₀..Ω_{m_max} from the Maclaurin-coefficient recurrence.
pub fn omega_recurrence(model: &ProcessModel, q: f64, m_max: usize) -> Result<Vec<f64>> {
    let p = sinh_params(model)?;
    if !(q > 0.0) {
        return Err(Error::Domain(format!("the recurrence needs q > 0, got {q}")));
    }
    let b = b_coeffs(p, q, m_max + 2);
    let mut om: Vec<f64> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut s = (m + 1) as f64 * b[m + 1];
        for (n, o) in om.iter().enumerate() {
            s += o * b[m - n];
        }
        om.push(-s / b[0]);
    }
    Ok(om)
}
