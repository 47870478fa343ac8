//! Wiener–Hopf factors φ_q^± as root/pole products with accelerated tails.

mod tail;

pub use tail::{accelerate_tail, f_euler_maclaurin, f_hurwitz};

use crate::error::{Error, Result};
use crate::models::{BetaFamilyModel, ProcessModel};
use crate::roots::{partner, ComplexRootPath, ExpansionOrder, HalfRoots, LocalRoot, RootGrid, Strand};
use crate::specfun::{lgamma, ln_1p};
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, RwLock, RwLockReadGuard};

fn entry(m: &ProcessModel, n: usize, r: LocalRoot) -> Entry {
    let pair = match partner(m, n) {
        Some((pidx, poff)) => {
            let p = Cx::from(m.anchor(pidx) + poff);
            let d = (m.anchor(r.idx) - m.anchor(pidx)) + (r.off - poff);
            Pair::Partner { p, d, lead: ln_1p(d / p) }
        }
        None => Pair::Lone(r.zeta(m)),
    };
    Entry { root: r, pair }
}

/// ln(1+s/p_n) − ln(1+s/ζ_n), or only the pole part when `skip`.
fn term(e: &Entry, s: Cx, skip: bool) -> Result<Cx> {
    match e.pair {
        Pair::Partner { p, .. } if skip => Ok(ln_1p(s / p)),
        Pair::Partner { p, d, lead } => Ok(lead - ln_1p(d / (s + p))),
        Pair::Lone(_) if skip => Ok(Cx::new(0.0, 0.0)),
        Pair::Lone(z) if z.norm() == 0.0 => Err(Error::Domain("this factor degenerates: ζ₀ = 0 at q = 0".into())),
        Pair::Lone(z) => Ok(-ln_1p(s / z)),
    }
}

/// Default number of explicit root/pole pairs.
pub const DEFAULT_N: usize = 200;
/// Largest explicit truncation reached by escalation.
pub const MAX_K: usize = 1 << 18;
const DOUBLING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorSide {
    Plus,
    Minus,
}

/// How the tail beyond the explicit product is handled.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// Series-accelerated tail, kept in its convergent range.
    Series(ExpansionOrder),
    /// First-order tail with doubling of the explicit range.
    FirstOrder,
    /// No usable expansion: gamma ratio with a fitted shift, plus doubling.
    Fitted,
}

/// One factor, φ_q⁺ or φ_q⁻, for a fixed (possibly complex) q.
#[derive(Clone, Debug)]
pub struct FactorProduct {
    pub side: FactorSide,
    pub model: ProcessModel,
    pub q: Cx,
    pub n: usize,
    pub mode: TailMode,
    half: HalfRoots,
    cache: Arc<RwLock<Vec<Entry>>>,
    grow: Arc<Mutex<()>>,
}

/// A root with the s-independent parts of its product term.
#[derive(Clone, Copy, Debug)]
struct Entry {
    root: LocalRoot,
    pair: Pair,
}

#[derive(Clone, Copy, Debug)]
enum Pair {
    /// Pole p, root − pole d and ln(1 + d/p).
    Partner { p: Cx, d: Cx, lead: Cx },
    /// Unpaired root ζ.
    Lone(Cx),
}

/// A factor value with the size of the last tail or doubling correction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorValue {
    pub value: Cx,
    pub error: f64,
    /// Explicit truncation actually used.
    pub k: usize,
}

impl FactorProduct {
    pub(crate) fn from_half(model: &ProcessModel, side: FactorSide, half: HalfRoots, n: usize) -> FactorProduct {
        let mode = match &half.expansion {
            Ok(e) if e.order == ExpansionOrder::FirstOrder => TailMode::FirstOrder,
            Ok(e) => TailMode::Series(e.order),
            Err(_) => TailMode::Fitted,
        };
        let cache = Arc::new(RwLock::new(half.roots.iter().enumerate().map(|(k, r)| entry(&half.model, k, *r)).collect()));
        FactorProduct { side, model: *model, q: half.q, n, mode, half, cache, grow: Arc::new(Mutex::new(())) }
    }

    /// Factor from a real-q root grid, truncated at the grid's N.
    pub fn new(grid: &RootGrid, side: FactorSide) -> FactorProduct {
        Self::with_n(grid, side, grid.n)
    }

    /// Factor with an explicit truncation N (roots past the grid are solved as needed).
    pub fn with_n(grid: &RootGrid, side: FactorSide, n: usize) -> FactorProduct {
        let half = match side {
            FactorSide::Minus => grid.pos.clone(),
            FactorSide::Plus => grid.neg.clone(),
        };
        Self::from_half(&grid.model, side, half, n)
    }

    /// Factor at q₀ + iu_j from a continued root path.
    pub fn from_path(path: &ComplexRootPath, j: usize, side: FactorSide) -> FactorProduct {
        let (pos, neg) = path.halves_at(j);
        let half = if side == FactorSide::Minus { pos } else { neg };
        let n = half.roots.len() - 1;
        Self::from_half(&path.model, side, half, n)
    }

    /// The cache, grown to hold root n.
    fn entries(&self, n: usize) -> Result<RwLockReadGuard<'_, Vec<Entry>>> {
        {
            let c = self.cache.read().unwrap();
            if c.len() > n {
                return Ok(c);
            }
        }
        let _g = self.grow.lock().unwrap();
        let start = self.cache.read().unwrap().len();
        if start <= n {
            let end = (2 * start).min(MAX_K + 1).max(n + 1);
            let m = &self.half.model;
            let fresh: Vec<Entry> =
                (start..end).into_par_iter().map(|k| Ok(entry(m, k, self.half.root(k)?))).collect::<Result<_>>()?;
            self.cache.write().unwrap().extend(fresh);
        }
        Ok(self.cache.read().unwrap())
    }

    /// Root n of this side, in the positive coordinates of the side's model.
    pub(crate) fn root(&self, n: usize) -> Result<LocalRoot> {
        Ok(self.entries(n)?[n].root)
    }

    /// Number of consecutive roots that make up one period of the lattice.
    pub(crate) fn period(&self) -> usize {
        match &self.half.expansion {
            Ok(e) => e.strands.iter().map(|s| s.stride as usize).max().unwrap_or(1),
            Err(_) => 1,
        }
    }

    pub(crate) fn side_model(&self) -> &ProcessModel {
        &self.half.model
    }

    /// ζ_n of this side's positive-coordinate model.
    pub(crate) fn zeta(&self, n: usize) -> Result<Cx> {
        Ok(self.root(n)?.zeta(&self.half.model))
    }

    fn explicit(&self, from: usize, to: usize, s: Cx, skip: Option<usize>) -> Result<Cx> {
        if to < from {
            return Ok(Cx::new(0.0, 0.0));
        }
        let c = self.entries(to)?;
        c[from..=to]
            .par_iter()
            .with_min_len(256)
            .enumerate()
            .map(|(i, e)| term(e, s, skip == Some(from + i)))
            .try_reduce(|| Cx::new(0.0, 0.0), |a, b| Ok(a + b))
    }

    fn strands_tail(&self, strands: &[Strand], k: usize, s: Cx) -> (Cx, f64) {
        let mut total = Cx::new(0.0, 0.0);
        let mut err: f64 = 0.0;
        for st in strands {
            // first strand index whose root number exceeds k
            let mut j = ((k as i64 + 1 - st.rem) as f64 / st.stride as f64).ceil() as i64;
            j = j.max(0);
            let (v, e) = tail::strand_log_tail(st, j, s / st.scale);
            total += v;
            err = err.max(e);
        }
        (total, err)
    }

    /// Explicit range needed before the series tail is in its convergent
    /// range, with the strands cut where their corrections stop helping.
    fn plan(&self, strands: &[Strand], s: Cx, settle: bool) -> (usize, Vec<Strand>) {
        let mut k = self.n.max(10);
        let mut cut = Vec::with_capacity(strands.len());
        for st in strands {
            let w = (s / st.scale).norm();
            let need = (2.0 * w + 2.0 - st.b).max(0.0) * st.stride as f64;
            k = k.max(need.ceil() as usize);
            if settle {
                let (j, c) = crate::roots::omega::settle(st, 8, 1e-14 / (1.0 + w));
                k = k.max(j * st.stride as usize);
                cut.push(c);
            } else {
                cut.push(st.clone());
            }
        }
        (k.min(MAX_K), cut)
    }

    fn fitted_strand(&self, k: usize) -> Result<Strand> {
        let m = &self.half.model;
        let ProcessModel::BetaFamily(b) = m else {
            return Err(Error::Regime("fitted tails exist for the beta family only".into()));
        };
        let z = self.zeta(k)?.re;
        Ok(Strand { stride: 1, rem: 0, scale: b.beta2, a: b.alpha2 - 1.0, b: z / b.beta2 - k as f64, terms: vec![] })
    }

    /// ln F(s) where F(s) = Π over this side's (root, pole) pairs of
    /// (1+s/p)/(1+s/ζ); `skip` drops the root factor of one index.
    pub(crate) fn log_product(&self, s: Cx, skip: Option<usize>) -> Result<FactorValue> {
        if s.norm() == 0.0 && skip.is_none() {
            return Ok(FactorValue { value: Cx::new(0.0, 0.0), error: 0.0, k: 0 });
        }
        let out = match (&self.mode, &self.half.expansion) {
            (TailMode::Series(_), Ok(e)) => {
                let (k, cut) = self.plan(&e.strands, s, true);
                let head = self.explicit(0, k, s, skip)?;
                let (t, err) = self.strands_tail(&cut, k, s);
                FactorValue { value: head + t, error: err, k }
            }
            _ => {
                let strands = |k: usize| -> Result<Vec<Strand>> {
                    match &self.half.expansion {
                        Ok(e) => Ok(e.strands.clone()),
                        Err(_) => Ok(vec![self.fitted_strand(k)?]),
                    }
                };
                let mut k = match &self.half.expansion {
                    Ok(e) => self.plan(&e.strands, s, false).0,
                    Err(_) => self.n.max(10).max((4.0 * s.norm()) as usize),
                };
                let mut head = self.explicit(0, k, s, skip)?;
                let mut seq = vec![head + self.strands_tail(&strands(k)?, k, s).0];
                let mut acc: Vec<Cx> = Vec::new();
                loop {
                    let k2 = 2 * k;
                    if k2 > MAX_K {
                        let v = *acc.last().unwrap_or(seq.last().unwrap());
                        break FactorValue { value: v, error: f64::INFINITY, k };
                    }
                    head += self.explicit(k + 1, k2, s, skip)?;
                    seq.push(head + self.strands_tail(&strands(k2)?, k2, s).0);
                    k = k2;
                    let j = seq.len() - 1;
                    let change = (seq[j] - seq[j - 1]).norm();
                    if change < DOUBLING_TOL {
                        break FactorValue { value: seq[j], error: change, k };
                    }
                    // Aitken's Δ² on the doubling sequence (power-law remainder)
                    if j >= 2 {
                        let (d1, d2) = (seq[j - 1] - seq[j - 2], seq[j] - seq[j - 1]);
                        let den = d2 - d1;
                        acc.push(if den.norm() > 0.0 { seq[j] - d2 * d2 / den } else { seq[j] });
                        if acc.len() >= 2 {
                            let ch = (acc[acc.len() - 1] - acc[acc.len() - 2]).norm();
                            if ch < DOUBLING_TOL {
                                break FactorValue { value: acc[acc.len() - 1], error: ch, k };
                            }
                        }
                    }
                }
            }
        };
        if !(out.value.re.is_finite() && out.value.im.is_finite()) {
            return Err(Error::Pole(format!("factor product is singular at s={s}")));
        }
        Ok(out)
    }

    /// φ(z) with its error estimate.
    pub fn phi_with_error(&self, z: Cx) -> Result<FactorValue> {
        let s = match self.side {
            FactorSide::Minus => Cx::new(0.0, 1.0) * z,
            FactorSide::Plus => Cx::new(0.0, -1.0) * z,
        };
        let mut v = self.log_product(s, None)?;
        v.value = v.value.exp();
        Ok(v)
    }

    /// φ(z); fails when the tail estimate is too large to trust.
    pub fn phi(&self, z: Cx) -> Result<Cx> {
        let v = self.phi_with_error(z)?;
        if v.error > 1e-6 {
            return Err(Error::Accuracy(format!("factor tail uncertain by {:.2e} at z={z}", v.error)));
        }
        Ok(v.value)
    }

    pub fn to_csv(&self, zs: &[Cx]) -> Result<String> {
        let mut s = String::from("z_re,z_im,phi_re,phi_im\n");
        for z in zs {
            let p = self.phi(*z)?;
            s.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", z.re, z.im, p.re, p.im));
        }
        Ok(s)
    }
}

pub fn phi_plus(grid: &RootGrid, z: Cx) -> Result<Cx> {
    FactorProduct::new(grid, FactorSide::Plus).phi(z)
}

pub fn phi_minus(grid: &RootGrid, z: Cx) -> Result<Cx> {
    FactorProduct::new(grid, FactorSide::Minus).phi(z)
}

fn sech_eta_p0(alpha: f64, q: f64) -> Result<(f64, f64)> {
    let m = crate::models::SechPoissonModel::new(alpha)?;
    if q < 0.0 || (q == 0.0 && alpha >= 0.0) {
        return Err(Error::Domain(format!("need q > 0, or q = 0 with alpha < 0 (q={q}, alpha={alpha})")));
    }
    let eta = m.eta(q);
    let g = |x: f64| lgamma(Cx::new(x, 0.0)).re;
    let p0 = (g(0.25 * (1.0 - alpha)) + g(0.25 * (3.0 - alpha)) - g(0.25 * (eta - alpha)) - g(0.25 * (4.0 - eta - alpha))).exp();
    Ok((eta, p0))
}

/// φ_q⁺ of the sech model in closed form (gamma ratios).
pub fn phi_plus_closed_sech(alpha: f64, q: f64, z: Cx) -> Result<Cx> {
    let (eta, p0) = sech_eta_p0(alpha, q)?;
    if z.im <= alpha - eta {
        return Err(Error::Domain(format!("closed form holds for Im z > {}", alpha - eta)));
    }
    let iz = Cx::new(0.0, 1.0) * z;
    let l = |x: f64| lgamma((Cx::new(x, 0.0) - iz) * 0.25);
    Ok(p0 * (l(eta - alpha) + l(4.0 - eta - alpha) - l(1.0 - alpha) - l(3.0 - alpha)).exp())
}

/// P(S_τ = 0) for the sech model.
pub fn sech_atom(alpha: f64, q: f64) -> Result<f64> {
    Ok(sech_eta_p0(alpha, q)?.1)
}

/// η = arccot(μ/4π)/π of the σ = α = 0 sinh model.
pub fn sinh_q4_eta(mu: f64) -> f64 {
    0.5 - (mu / (4.0 * PI)).atan() / PI
}

/// φ₄⁺ for the sinh model with σ = α = 0: Γ(η−iz)/(Γ(η)Γ(1−iz)).
pub fn phi_plus_closed_sinh_q4(mu: f64, z: Cx) -> Result<Cx> {
    let eta = sinh_q4_eta(mu);
    let iz = Cx::new(0.0, 1.0) * z;
    let one = Cx::new(1.0, 0.0);
    let v = lgamma(iz * -1.0 + eta) - lgamma(Cx::new(eta, 0.0)) - lgamma(one - iz);
    Ok(v.exp())
}

fn beta_has_atom(m: &BetaFamilyModel) -> bool {
    m.sigma == 0.0 && m.lambda1 < 2.0 && m.lambda2 < 2.0 && m.rho_c > 0.0
}

/// P(S_τ = 0): closed form for the sech model, the z → +i∞ limit of φ⁺
/// for bounded-variation beta models with negative drift, 0 otherwise.
pub fn atom_probability(model: &ProcessModel, grid: &RootGrid) -> Result<f64> {
    match model {
        ProcessModel::SechPoisson(m) => sech_atom(m.alpha, grid.q),
        ProcessModel::SinhSquare(_) => Ok(0.0),
        ProcessModel::BetaFamily(m) if !beta_has_atom(m) => Ok(0.0),
        ProcessModel::BetaFamily(_) => {
            // −ζ₀⁻/(α₁β₁) Π_{n≤−1} ζ_n/(β₁(n−α₁)); in the mirror's positive
            // coordinates root n is divided by the pole just above it
            let f = FactorProduct::new(grid, FactorSide::Plus);
            let m = *f.side_model();
            let term = |n: usize| -> Result<f64> {
                let r = f.root(n)?;
                let hi = n as i64 + 1;
                let p = m.anchor(hi);
                let d = if r.idx == hi { r.off.re } else { r.off.re - (p - m.anchor(r.idx)) };
                Ok(ln_1p(Cx::new(d / p, 0.0)).re)
            };
            let sum = |a: usize, b: usize| -> Result<f64> {
                Ok((a..=b).into_par_iter().map(term).collect::<Result<Vec<_>>>()?.iter().sum())
            };
            let mut k = f.n.max(64);
            let mut head = sum(0, k)?;
            let mut prev = f64::NAN;
            loop {
                // power-law tail fitted to the last two terms
                let (t1, t2) = (term(k / 2)?, term(k)?);
                let r = (t1 / t2).ln() / 2f64.ln();
                let tail = if r > 1.05 { t2 * k as f64 / (r - 1.0) } else { 0.0 };
                let cur = head + tail;
                if (cur - prev).abs() < 1e-10 || 2 * k > MAX_K {
                    return Ok(cur.exp().clamp(0.0, 1.0));
                }
                prev = cur;
                head += sum(k + 1, 2 * k)?;
                k *= 2;
            }
        }
    }
}
