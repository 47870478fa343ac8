//! Solutions of q + Ψ(iζ) = 0.
//!
//! Only positive roots are ever solved for; the negative ones are the
//! positive roots of the mirrored model, negated.

pub mod asymptotics;
pub mod continuation;
pub mod omega;
mod series;

pub use asymptotics::{asymptotic_root, Expansion, ExpansionOrder, Strand};
pub use continuation::{continue_complex_q, ComplexRootPath, StepControl};
pub use omega::{omega_direct, omega_recurrence};

use crate::error::{Error, Result};
use crate::models::ProcessModel;
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Below this |n| roots are bracketed by bisection before Newton.
pub const N_MIN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootId {
    Neg(usize),
    ZeroMinus,
    ZeroPlus,
    Pos(usize),
}

impl fmt::Display for RootId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootId::Neg(n) => write!(f, "-{n}"),
            RootId::ZeroMinus => write!(f, "0-"),
            RootId::ZeroPlus => write!(f, "0+"),
            RootId::Pos(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for RootId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub id: RootId,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Where positive root n lives, in the anchored coordinates of `idx_lo`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Slot {
    pub idx_lo: i64,
    pub lo: f64,
    pub hi: f64,
    /// Anchor at the upper end, when that end is a pole of the lattice.
    pub idx_hi: Option<i64>,
}

pub(crate) fn slot(model: &ProcessModel, n: usize) -> Slot {
    let n = n as i64;
    match model {
        ProcessModel::SinhSquare(m) => {
            if n == 0 {
                Slot { idx_lo: 0, lo: -m.alpha, hi: 1.0, idx_hi: Some(1) }
            } else {
                Slot { idx_lo: n, lo: 0.0, hi: 1.0, idx_hi: Some(n + 1) }
            }
        }
        ProcessModel::SechPoisson(m) => {
            if n == 0 {
                Slot { idx_lo: 0, lo: (-m.alpha).max(0.0), hi: 1.0, idx_hi: None }
            } else if n % 2 == 1 {
                Slot { idx_lo: (n + 1) / 2, lo: -1.0, hi: 0.0, idx_hi: None }
            } else {
                Slot { idx_lo: n / 2, lo: 0.0, hi: 1.0, idx_hi: None }
            }
        }
        ProcessModel::BetaFamily(m) => {
            if n == 0 {
                Slot { idx_lo: 0, lo: 0.0, hi: m.beta2 * m.alpha2, idx_hi: Some(1) }
            } else {
                Slot { idx_lo: n, lo: 0.0, hi: m.beta2, idx_hi: Some(n + 1) }
            }
        }
    }
}

/// Numerator pole paired with positive root n, as (anchor idx, offset).
pub(crate) fn partner(model: &ProcessModel, n: usize) -> Option<(i64, f64)> {
    let n = n as i64;
    match model {
        ProcessModel::SechPoisson(_) => {
            if n % 2 == 1 {
                Some(((n + 1) / 2, -1.0))
            } else {
                Some((n / 2, 1.0))
            }
        }
        _ if n == 0 => None,
        _ => Some((n, 0.0)),
    }
}

/// A root in anchored coordinates: ζ = anchor(idx) + off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LocalRoot {
    pub idx: i64,
    pub off: Cx,
}

impl LocalRoot {
    pub fn zeta(&self, model: &ProcessModel) -> Cx {
        self.off + model.anchor(self.idx)
    }
}

/// Positive roots of one side, r₀ (= ζ₀ of that side), r₁, r₂, ...
#[derive(Clone, Debug)]
pub(crate) struct HalfRoots {
    pub model: ProcessModel,
    pub q: Cx,
    pub roots: Vec<LocalRoot>,
    pub expansion: std::result::Result<Expansion, Error>,
}

impl HalfRoots {
    /// Root n, solving past the stored range when needed.
    pub fn root(&self, n: usize) -> Result<LocalRoot> {
        if let Some(r) = self.roots.get(n) {
            return Ok(*r);
        }
        if self.q.im == 0.0 {
            solve_positive(&self.model, self.q.re, n, self.expansion.as_ref().ok()).map(|x| x.0)
        } else {
            solve_positive_complex(&self.model, self.q, n, self.expansion.as_ref().ok())
        }
    }

    pub fn zeta(&self, n: usize) -> Result<Cx> {
        Ok(self.root(n)?.zeta(&self.model))
    }
}

const EPS_LADDER: [f64; 8] = [1e-12, 1e-16, 1e-24, 1e-40, 1e-80, 1e-160, 1e-240, 1e-300];

/// Safeguarded Newton on a bracket [a, b] with f(a) f(b) < 0.
fn rtsafe(f: &dyn Fn(f64) -> (f64, f64), a: f64, b: f64, fa: f64, x0: f64) -> Result<f64> {
    // orient so that f(lo) < 0
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = if (x0 - a) * (x0 - b) < 0.0 { x0 } else { 0.5 * (a + b) };
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..300 {
        if fx == 0.0 {
            return Ok(x);
        }
        let newton_ok = dfx != 0.0 && {
            let t = x - fx / dfx;
            (t - lo) * (t - hi) < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() <= 2e-16 * x.abs() + 1e-300 || lo == hi {
            return Ok(x);
        }
        let r = f(x);
        fx = r.0;
        dfx = r.1;
        if !fx.is_finite() {
            return Err(Error::Convergence(format!("non-finite residual at offset {x}")));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= 2e-16 * x.abs() {
            return Ok(x);
        }
    }
    Err(Error::Convergence(format!("no convergence near offset {x}")))
}

/// Positive root n of q + Ψ(iζ) = 0 for real q, with its residual.
pub(crate) fn solve_positive(
    model: &ProcessModel,
    q: f64,
    n: usize,
    exp: Option<&Expansion>,
) -> Result<(LocalRoot, f64)> {
    let s = slot(model, n);
    if n == 0 && q == 0.0 && model.mean() < 0.0 {
        let off = -model.anchor(0);
        return Ok((LocalRoot { idx: 0, off: Cx::new(off, 0.0) }, 0.0));
    }
    let eval = |idx: i64| {
        move |off: f64| -> (f64, f64) {
            let (g, dg) = model.g_dg(idx, Cx::new(off, 0.0));
            (q + g.re, dg.re)
        }
    };
    let f_lo = eval(s.idx_lo);
    let w = s.hi - s.lo;
    let d = s.idx_hi.map(|i| model.anchor(i) - model.anchor(s.idx_lo));
    let f_hi_end = |e: f64| match (s.idx_hi, d) {
        (Some(i), Some(_)) => eval(i)(-e * w).0,
        _ => f_lo(s.hi - e * w).0,
    };
    let mut found = None;
    for e in EPS_LADDER {
        let (a, b) = (f_lo(s.lo + e * w).0, f_hi_end(e));
        if a.is_finite() && b.is_finite() && a != 0.0 && b != 0.0 && a.signum() != b.signum() {
            found = Some((e, a));
            break;
        }
        if a == 0.0 {
            return Ok((LocalRoot { idx: s.idx_lo, off: Cx::new(s.lo + e * w, 0.0) }, 0.0));
        }
    }
    let (e, fa) = found.ok_or_else(|| {
        Error::Convergence(format!("root {n} of the {} model: no sign change in its interval at q={q}", model.family_name()))
    })?;
    let mid = s.lo + 0.5 * w;
    let fm = f_lo(mid).0;
    let seed = if n >= N_MIN { exp.and_then(|x| x.root(n as i64)).map(|z| z.re) } else { None };
    let (idx, a, b, fa, shift) = if fm == 0.0 {
        return finish(model, q, s.idx_lo, mid);
    } else if fm.signum() != fa.signum() || d.is_none() {
        if fm.signum() != fa.signum() {
            (s.idx_lo, s.lo + e * w, mid, fa, 0.0)
        } else {
            (s.idx_lo, mid, s.hi - e * w, fm, 0.0)
        }
    } else {
        let d = d.unwrap();
        (s.idx_hi.unwrap(), mid - d, -e * w, fm, d)
    };
    let f = eval(idx);
    let x0 = match seed {
        Some(z) => z - model.anchor(s.idx_lo) - shift,
        None => {
            // coarse bisection first
            let (mut lo, mut hi, flo) = (a, b, fa);
            while (hi - lo).abs() > 1e-3 * w {
                let m = 0.5 * (lo + hi);
                if f(m).0.signum() == flo.signum() {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        }
    };
    let off = rtsafe(&f, a, b, fa, x0)?;
    finish(model, q, idx, off)
}

fn finish(model: &ProcessModel, q: f64, idx: i64, off: f64) -> Result<(LocalRoot, f64)> {
    let r = LocalRoot { idx, off: Cx::new(off, 0.0) };
    let res = (q + model.g(idx, r.off)).norm();
    Ok((r, res))
}

/// Newton from the asymptotic seed, for complex q and large n.
pub(crate) fn solve_positive_complex(
    model: &ProcessModel,
    q: Cx,
    n: usize,
    exp: Option<&Expansion>,
) -> Result<LocalRoot> {
    let seed = exp
        .and_then(|x| x.root(n as i64))
        .ok_or_else(|| Error::Regime(format!("no asymptotic seed for root {n} at complex q")))?;
    let s = slot(model, n);
    let mut r = LocalRoot { idx: s.idx_lo, off: seed - model.anchor(s.idx_lo) };
    r = reanchor(model, n, r);
    newton_complex(model, q, n, r)
}

/// Re-express a root relative to the nearer end of its slot.
pub(crate) fn reanchor(model: &ProcessModel, n: usize, r: LocalRoot) -> LocalRoot {
    let s = slot(model, n);
    let Some(hi) = s.idx_hi else { return r };
    let z = r.zeta(model);
    let (a, b) = (model.anchor(s.idx_lo), model.anchor(hi));
    let (dl, dh) = ((z - a).norm(), (z - b).norm());
    if r.idx == s.idx_lo && dh < dl {
        LocalRoot { idx: hi, off: r.off - (b - a) }
    } else if r.idx == hi && dl < dh {
        LocalRoot { idx: s.idx_lo, off: r.off + (b - a) }
    } else {
        r
    }
}

pub(crate) fn newton_complex(model: &ProcessModel, q: Cx, n: usize, mut r: LocalRoot) -> Result<LocalRoot> {
    for _ in 0..60 {
        let (g, dg) = model.g_dg(r.idx, r.off);
        let step = (q + g) / dg;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::Convergence(format!("Newton broke down for root {n} at q={q}")));
        }
        r.off -= step;
        if step.norm() <= 4e-16 * r.off.norm() + 1e-300 {
            return Ok(reanchor(model, n, r));
        }
        r = reanchor(model, n, r);
    }
    let res = (q + model.g(r.idx, r.off)).norm();
    if res <= 1e-10 * (1.0 + q.norm()) {
        Ok(r)
    } else {
        Err(Error::Convergence(format!("Newton did not settle for root {n} at q={q}")))
    }
}

fn side_roots(model: &ProcessModel, q: f64, n: usize) -> Result<(HalfRoots, Vec<f64>)> {
    let expansion = asymptotics::expansion(model, Cx::new(q, 0.0));
    let exp = expansion.as_ref().ok();
    let solved: Vec<(LocalRoot, f64)> =
        (0..=n).into_par_iter().map(|k| solve_positive(model, q, k, exp)).collect::<Result<_>>()?;
    let (roots, res) = solved.into_iter().unzip();
    Ok((HalfRoots { model: *model, q: Cx::new(q, 0.0), roots, expansion }, res))
}

fn check_q(model: &ProcessModel, q: f64) -> Result<()> {
    if !q.is_finite() || q < 0.0 {
        return Err(Error::Domain(format!("q must be finite and >= 0, got {q}")));
    }
    if q == 0.0 && !model.allows_q_zero() {
        return Err(Error::Domain("q = 0 requires a negative mean (E X_1 < 0)".into()));
    }
    if let ProcessModel::BetaFamily(m) = model {
        if m.c1 == 0.0 || m.c2 == 0.0 {
            return Err(Error::Domain("root lattice needs c1 > 0 and c2 > 0".into()));
        }
    }
    Ok(())
}

/// The 2N+2 localization intervals, ordered from ζ₋N up to ζ_N.
pub fn localize(model: &ProcessModel, q: f64, n: usize) -> Result<Vec<Interval>> {
    check_q(model, q)?;
    let mir = model.mirror();
    let ends = |m: &ProcessModel, k: usize| {
        let s = slot(m, k);
        let a = m.anchor(s.idx_lo);
        (a + s.lo, a + s.hi)
    };
    let mut out = Vec::with_capacity(2 * n + 2);
    for k in (1..=n).rev() {
        let (lo, hi) = ends(&mir, k);
        out.push(Interval { id: RootId::Neg(k), lo: -hi, hi: -lo });
    }
    let (lo, hi) = ends(&mir, 0);
    out.push(Interval { id: RootId::ZeroMinus, lo: -hi, hi: -lo });
    let (lo, hi) = ends(model, 0);
    out.push(Interval { id: RootId::ZeroPlus, lo, hi });
    for k in 1..=n {
        let (lo, hi) = ends(model, k);
        out.push(Interval { id: RootId::Pos(k), lo, hi });
    }
    Ok(out)
}

/// All roots ζ₀±, ζ_{±1..±N} for one real q.
#[derive(Clone, Debug, Serialize)]
pub struct RootGrid {
    pub model: ProcessModel,
    pub q: f64,
    pub n: usize,
    pub zeta0_minus: f64,
    pub zeta0_plus: f64,
    pub zeta_pos: Vec<f64>,
    pub zeta_neg: Vec<f64>,
    /// Rows in `intervals` order.
    pub residuals: Vec<f64>,
    pub intervals: Vec<Interval>,
    #[serde(skip)]
    pub(crate) pos: HalfRoots,
    #[serde(skip)]
    pub(crate) neg: HalfRoots,
}

/// Solve q + Ψ(iζ) = 0 for the 2N+2 roots nearest the origin.
pub fn solve_real_q(model: &ProcessModel, q: f64, n: usize) -> Result<RootGrid> {
    let intervals = localize(model, q, n)?;
    let (pos, rp) = side_roots(model, q, n)?;
    let (neg, rn) = side_roots(&model.mirror(), q, n)?;
    let zp: Vec<f64> = pos.roots.iter().map(|r| r.zeta(&pos.model).re).collect();
    let zn: Vec<f64> = neg.roots.iter().map(|r| -r.zeta(&neg.model).re).collect();
    let mut residuals: Vec<f64> = rn[1..].iter().rev().copied().collect();
    residuals.push(rn[0]);
    residuals.push(rp[0]);
    residuals.extend_from_slice(&rp[1..]);
    Ok(RootGrid {
        model: *model,
        q,
        n,
        zeta0_minus: zn[0],
        zeta0_plus: zp[0],
        zeta_pos: zp[1..].to_vec(),
        zeta_neg: zn[1..].to_vec(),
        residuals,
        intervals,
        pos,
        neg,
    })
}

impl RootGrid {
    /// Root values in `intervals` order.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.zeta_neg.iter().rev().copied().collect();
        v.push(self.zeta0_minus);
        v.push(self.zeta0_plus);
        v.extend_from_slice(&self.zeta_pos);
        v
    }

    pub fn get(&self, id: RootId) -> f64 {
        match id {
            RootId::Neg(k) => self.zeta_neg[k - 1],
            RootId::ZeroMinus => self.zeta0_minus,
            RootId::ZeroPlus => self.zeta0_plus,
            RootId::Pos(k) => self.zeta_pos[k - 1],
        }
    }

    /// CSV with columns n, zeta, residual, interval_lo, interval_hi.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,zeta,residual,interval_lo,interval_hi\n");
        for ((iv, z), r) in self.intervals.iter().zip(self.values()).zip(&self.residuals) {
            s.push_str(&format!("{},{:.17e},{:.17e},{:.17e},{:.17e}\n", iv.id, z, r, iv.lo, iv.hi));
        }
        s
    }

    /// Roots shifted by a fixed amount, for fault injection.
    pub fn perturbed(&self, id: RootId, by: f64) -> RootGrid {
        let mut g = self.clone();
        let (half, k, sign) = match id {
            RootId::Neg(k) => (&mut g.neg, k, -1.0),
            RootId::ZeroMinus => (&mut g.neg, 0, -1.0),
            RootId::ZeroPlus => (&mut g.pos, 0, 1.0),
            RootId::Pos(k) => (&mut g.pos, k, 1.0),
        };
        half.roots[k].off += sign * by;
        match id {
            RootId::Neg(k) => g.zeta_neg[k - 1] += by,
            RootId::ZeroMinus => g.zeta0_minus += by,
            RootId::ZeroPlus => g.zeta0_plus += by,
            RootId::Pos(k) => g.zeta_pos[k - 1] += by,
        }
        g
    }
}

#[cfg(test)]
mod tests;
