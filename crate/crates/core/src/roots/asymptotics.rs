//! Large-n expansions of the positive roots.
//!
//! Roots of one side are grouped into strands. Along a strand, root number
//! n = stride·k + rem sits at scale·(k + b + δ_k) with
//! δ_k = Σ c_j (k+b)^{−p_j}, and its partner pole at scale·(k + a).

use super::series::{sincos_pi_coeffs, solve_implicit, xcotx_coeffs, Series};
use crate::error::{Error, Result};
use crate::models::{BetaFamilyModel, ProcessModel, SechPoissonModel, SinhSquareModel};
use crate::specfun::{gamma_real, sin_pi_real};
use num_complex::Complex64 as Cx;
use serde::Serialize;
use std::f64::consts::PI;

/// Number of inverse powers kept for the sinh⁻² expansions.
pub(crate) const SERIES_TERMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionOrder {
    /// Roots known in closed form; tails reduce to gamma ratios.
    Exact,
    /// Many orders available (δ_k known well beyond O(k⁻³)).
    Full,
    /// Only the leading correction is known.
    FirstOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Strand {
    pub stride: i64,
    pub rem: i64,
    pub scale: f64,
    pub a: f64,
    pub b: f64,
    /// (p_j, c_j)
    pub terms: Vec<(f64, Cx)>,
}

impl Strand {
    /// Strand coordinate of root n, if the root belongs here.
    pub fn k_of(&self, n: i64) -> Option<i64> {
        if n >= self.rem && (n - self.rem) % self.stride == 0 {
            Some((n - self.rem) / self.stride)
        } else {
            None
        }
    }

    /// δ_k, truncated before the terms start growing.
    pub fn delta(&self, k: i64) -> Cx {
        let y = k as f64 + self.b;
        let mut sum = Cx::new(0.0, 0.0);
        let mut last = f64::INFINITY;
        for (p, c) in &self.terms {
            let t = c * y.powf(-p);
            if *p > 0.0 && t.norm() > last {
                break;
            }
            if *p > 0.0 {
                last = t.norm();
            }
            sum += t;
        }
        sum
    }

    /// Scale past which successive terms decrease geometrically: the
    /// series behaves like Σ c₁ (R/y)^{j−1} y^{−1}.
    pub fn radius(&self) -> f64 {
        let pos: Vec<_> = self.terms.iter().filter(|t| t.0 > 0.0).collect();
        let mut r: f64 = 0.0;
        for w in pos.windows(2) {
            let (a, b) = (w[0].1.norm(), w[1].1.norm());
            if a > 0.0 {
                r = r.max((b / a).powf(1.0 / (w[1].0 - w[0].0)));
            }
        }
        r
    }

    /// The strand cut after the first correction that, like the one after
    /// it, is at most tol·y at y.
    pub(crate) fn truncated(&self, y: f64, tol: f64) -> Option<Strand> {
        let size = |(p, c): &(f64, Cx)| if *p > 0.0 { c.norm() * y.powf(-p) } else { 0.0 };
        let small: Vec<bool> = self.terms.iter().map(|t| size(t) <= tol * y).collect();
        if small.iter().all(|s| *s) {
            return Some(self.clone());
        }
        (0..self.terms.len()).find(|&j| small[j] && self.terms[j].0 > 0.0 && small.get(j + 1).copied().unwrap_or(true)).map(|j| Strand {
            terms: self.terms[..=j].to_vec(),
            ..self.clone()
        })
    }

    pub fn root(&self, k: i64) -> Cx {
        (self.delta(k) + k as f64 + self.b) * self.scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub order: ExpansionOrder,
    pub strands: Vec<Strand>,
}

impl Expansion {
    pub fn strand_of(&self, n: i64) -> Option<(&Strand, i64)> {
        self.strands.iter().find_map(|s| s.k_of(n).map(|k| (s, k)))
    }

    pub fn root(&self, n: i64) -> Option<Cx> {
        self.strand_of(n).map(|(s, k)| s.root(k))
    }
}

/// Expansion of the positive-side roots of q + Ψ(iζ) = 0.
pub(crate) fn expansion(model: &ProcessModel, q: Cx) -> Result<Expansion> {
    match model {
        ProcessModel::SechPoisson(m) => Ok(sech_strands(m, q)),
        ProcessModel::SinhSquare(m) => Ok(sinh_expansion(m, q)),
        ProcessModel::BetaFamily(m) => beta_expansion(m),
    }
}

fn sech_strands(m: &SechPoissonModel, q: Cx) -> Expansion {
    let eta = sech_eta(m, q);
    let al = m.alpha;
    let even = Strand { stride: 2, rem: 0, scale: 4.0, a: (al + 1.0) / 4.0, b: 0.0, terms: vec![] };
    let odd = Strand { stride: 2, rem: 1, scale: 4.0, a: 1.0 + (al - 1.0) / 4.0, b: 0.0, terms: vec![] };
    // b may be complex for complex q; carry the imaginary part as a constant δ
    let be = (eta + al) / 4.0;
    let bo = (-eta + al) / 4.0 + 1.0;
    let fix = |mut s: Strand, b: Cx| {
        s.b = b.re;
        if b.im != 0.0 {
            s.terms.push((0.0, Cx::new(0.0, b.im)));
        }
        s
    };
    Expansion { order: ExpansionOrder::Exact, strands: vec![fix(even, be), fix(odd, bo)] }
}

/// η with cos(πη/2) = π/(q + jump rate), continued to complex q.
pub(crate) fn sech_eta(m: &SechPoissonModel, q: Cx) -> Cx {
    if q.im == 0.0 {
        return Cx::new(m.eta(q.re), 0.0);
    }
    (Cx::new(PI, 0.0) / (q + m.jump_rate())).acos() * (2.0 / PI)
}

fn sinh_expansion(m: &SinhSquareModel, q: Cx) -> Expansion {
    let len = SERIES_TERMS + 1;
    let (al, rho, gam) = (m.alpha, m.rho_c, m.gamma_c);
    let e = Series::var(len);
    let one = Cx::new(1.0, 0.0);
    if m.sigma > 0.0 {
        let s2 = m.sigma * m.sigma;
        let t = xcotx_coeffs(len);
        let e2 = &e * &e;
        let g = |v: &Series| {
            let e2v = &e2 * v;
            let lead = e.scale(Cx::new(-al, 0.0)).add_const(one);
            let lead = &lead + &e2v;
            let tt = (&e * v).scale(Cx::new(PI, 0.0)).compose(&t);
            let first = (&lead * &tt).scale(Cx::new(4.0, 0.0));
            let w = e2v.add_const(one);
            let br = (&w * &w).scale(Cx::new(0.5 * s2, 0.0));
            let br = &br + &(&e * &w).scale(Cx::new(rho, 0.0));
            let br = &br + &e2.scale(4.0 * gam - q);
            &first - &(v * &br)
        };
        let v = solve_implicit(g, Cx::new(8.0 / s2, 0.0), Cx::new(-0.5 * s2, 0.0), len);
        let terms = (0..SERIES_TERMS).map(|j| ((j + 1) as f64, v.0[j])).collect();
        let s = Strand { stride: 1, rem: 0, scale: 1.0, a: al, b: al, terms };
        return Expansion { order: ExpansionOrder::Full, strands: vec![s] };
    }
    let w0 = sinh_omega0(rho);
    let (s0, c0) = ((PI * w0).sin(), (PI * w0).cos());
    let (sp, cp) = sincos_pi_coeffs(len);
    let g = |s: &Series| {
        // the constant of s is zero by construction of ω₀
        let mut s = s.clone();
        s.0[0] = Cx::new(0.0, 0.0);
        let s = &s;
        let om = s.add_const(Cx::new(w0, 0.0));
        let (ss, cs) = (s.compose(&sp), s.compose(&cp));
        let cosw = &cs.scale(Cx::new(c0, 0.0)) - &ss.scale(Cx::new(s0, 0.0));
        let sinw = &cs.scale(Cx::new(s0, 0.0)) + &ss.scale(Cx::new(c0, 0.0));
        let lead = &e.scale(Cx::new(-al, 0.0)).add_const(one) + &(&e * &om);
        let first = (&lead * &cosw).scale(Cx::new(4.0 * PI, 0.0));
        let br = &(&e * &om).add_const(one).scale(Cx::new(rho, 0.0)) + &e.scale(4.0 * gam - q);
        &first - &(&sinw * &br)
    };
    let d = Cx::new(-4.0 * PI * PI * s0 - PI * rho * c0, 0.0);
    let s = solve_implicit(g, Cx::new(0.0, 0.0), d, len);
    // ζ = K + ω₀ + Σ s_j K^{−j}, K = n+α; re-expand in powers of (n+α+ω₀)⁻¹
    let mut terms = Vec::new();
    for r in 1..len {
        let mut c = Cx::new(0.0, 0.0);
        for j in 1..=r {
            c += s.0[j] * binom((r - 1) as f64, (r - j) as f64) * w0.powi((r - j) as i32);
        }
        terms.push((r as f64, c));
    }
    let st = Strand { stride: 1, rem: 0, scale: 1.0, a: al, b: al + w0, terms };
    Expansion { order: ExpansionOrder::Full, strands: vec![st] }
}

/// ω₀ = arccot(ρ/4π)/π ∈ (0,1).
pub(crate) fn sinh_omega0(rho: f64) -> f64 {
    0.5 - (rho / (4.0 * PI)).atan() / PI
}

fn binom(n: f64, k: f64) -> f64 {
    let mut r = 1.0;
    let mut i = 0.0;
    while i < k {
        r *= (n - i) / (i + 1.0);
        i += 1.0;
    }
    r
}

fn beta_expansion(m: &BetaFamilyModel) -> Result<Expansion> {
    if m.c2 == 0.0 {
        return Err(Error::Regime("no positive jumps, so no positive pole lattice".into()));
    }
    let (c1, c2, a2, b1, b2, l1, l2) = (m.c1, m.c2, m.alpha2, m.beta1, m.beta2, m.lambda1, m.lambda2);
    if m.sigma > 0.0 {
        let s2 = m.sigma * m.sigma;
        let c = 2.0 * c2 / (s2 * b2.powi(3) * gamma_real(l2));
        let s = Strand { stride: 1, rem: 0, scale: b2, a: a2 - 1.0, b: a2 - 1.0, terms: vec![(3.0 - l2, Cx::new(c, 0.0))] };
        return Ok(Expansion { order: ExpansionOrder::FirstOrder, strands: vec![s] });
    }
    let (w0, amp, lam) = table_one(m)?;
    // snap: find which interval the expansion lands in at a large index
    let probe = 1000.0;
    let y = probe + a2 + w0;
    let val = b2 * y + amp * y.powf(lam);
    let m_idx = (val / b2 - a2).floor() + 1.0;
    let shift = m_idx - probe;
    let s = Strand {
        stride: 1,
        rem: 0,
        scale: b2,
        a: a2 - 1.0,
        b: a2 + w0 - shift,
        terms: vec![(-lam, Cx::new(amp / b2, 0.0))],
    };
    let _ = (c1, b1, l1);
    Ok(Expansion { order: ExpansionOrder::FirstOrder, strands: vec![s] })
}

/// (ω₀, A, λ) of the σ = 0 expansion ζ_{n+δ} = β₂(n+α₂+ω₀) + A(n+α₂+ω₀)^λ.
fn table_one(m: &BetaFamilyModel) -> Result<(f64, f64, f64)> {
    let (c1, c2, b1, b2, l1, l2, rho) = (m.c1, m.c2, m.beta1, m.beta2, m.lambda1, m.lambda2, m.rho_c);
    let tol = 1e-9;
    let near = |x: f64, y: f64| (x - y).abs() < tol;
    let uncovered = || Err(Error::Regime(format!("sigma=0 with lambda1={l1}, lambda2={l2} has no tabulated expansion")));
    if near(l2, 2.0) && l1 < 2.0 + tol || near(l1, 2.0) {
        return uncovered();
    }
    if l1 < 2.0 && l2 < 2.0 {
        if rho == 0.0 {
            return uncovered();
        }
        return Ok((0.0, c2 / (rho * b2 * gamma_real(l2)), l2 - 2.0));
    }
    if l1 < 2.0 && l2 > 2.0 {
        let a = -sin_pi_real(l2) * b2.powi(3) * rho / (PI * c2 * gamma_real(1.0 - l2));
        return Ok((2.0 - l2, a, 2.0 - l2));
    }
    // λ₁ > 2 from here on
    if c1 == 0.0 {
        return uncovered();
    }
    if near(l1, l2) {
        let ratio = c1 * b2.powf(l2) * gamma_real(1.0 - l1) / (c2 * b1.powf(l1) * gamma_real(1.0 - l2));
        let x0 = (sin_pi_real(l2) / (ratio - (PI * l2).cos())).atan() / PI;
        let s = sin_pi_real(x0);
        let a = -rho * s * s / (PI * PI) * b2.powi(3) / c2 * gamma_real(l2);
        return Ok((x0, a, 2.0 - l2));
    }
    if l2 < l1 {
        let a = c2 * b1.powf(l1) / (c1 * b2.powf(l1 - 1.0) * gamma_real(1.0 - l1) * gamma_real(l2));
        return Ok((0.0, a, l2 - l1));
    }
    let a = -sin_pi_real(l2) / PI * c1 * b2.powf(l1 + 1.0) * gamma_real(1.0 - l1) / (c2 * b1.powf(l1) * gamma_real(1.0 - l2));
    Ok((2.0 - l2, a, l1 - l2))
}

/// Seed value for root n of the full grid (n < 0 for the negative side).
pub fn asymptotic_root(model: &ProcessModel, q: f64, n: i64) -> Result<f64> {
    if n.unsigned_abs() < super::N_MIN as u64 {
        return Err(Error::Domain(format!("asymptotic seeds need |n| >= {}, got {n}", super::N_MIN)));
    }
    if n > 0 {
        let e = expansion(model, Cx::new(q, 0.0))?;
        Ok(e.root(n).expect("strands cover all n").re)
    } else {
        let e = expansion(&model.mirror(), Cx::new(q, 0.0))?;
        Ok(-e.root(-n).expect("strands cover all n").re)
    }
}
