//! Roots along q = q₀ + iu, traced from the real grid at u = 0.

use super::{asymptotics, newton_complex, reanchor, HalfRoots, LocalRoot, RootGrid, RootId};
use crate::error::{Error, Result};
use crate::models::ProcessModel;
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepControl {
    /// Local error tolerance relative to 1 + |ζ|.
    pub rtol: f64,
    pub h_init: f64,
    pub h_min: f64,
    /// Output spacing in u; the integrator lands exactly on each output point.
    pub du_out: f64,
    /// Extra spacing per unit of u: points are du_out + du_rel·u apart.
    pub du_rel: f64,
    pub collision_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-8, h_init: 1e-3, h_min: 1e-12, du_out: 1.0, du_rel: 0.0, collision_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexRootPath {
    pub q0: f64,
    pub u_grid: Vec<f64>,
    pub ids: Vec<RootId>,
    /// paths[i][j] is root ids[i] at u_grid[j].
    pub paths: Vec<Vec<Cx>>,
    /// Largest |q + Ψ(iζ)| / (1 + |q|) seen along each path.
    pub max_residual: Vec<f64>,
    #[serde(skip)]
    pub(crate) model: ProcessModel,
    #[serde(skip)]
    pub(crate) local: Vec<Vec<LocalRoot>>,
    #[serde(skip)]
    n: usize,
}

// Dormand–Prince 5(4)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One root path on the positive side of `model`.
fn trace(model: &ProcessModel, n: usize, start: LocalRoot, q0: f64, outs: &[f64], ctl: &StepControl) -> Result<(Vec<LocalRoot>, f64)> {
    let rhs = |r: &LocalRoot, off: Cx| -> Result<Cx> {
        let (_, dg) = model.g_dg(r.idx, off);
        let v = Cx::new(0.0, -1.0) / dg;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Stiffness(format!("root {n}: Ψ′ vanished along the path")))
        }
    };
    let mut r = start;
    let mut u = outs[0];
    let mut h = ctl.h_init;
    let mut out = vec![r];
    let mut worst: f64 = 0.0;
    for &target in &outs[1..] {
        while u < target {
            let step = h.min(target - u);
            let mut k = [Cx::new(0.0, 0.0); 7];
            let mut ok = true;
            for s in 0..7 {
                let mut y = r.off;
                for (j, kj) in k.iter().enumerate().take(s) {
                    y += kj * (A[s][j] * step);
                }
                match rhs(&r, y) {
                    Ok(v) => k[s] = v,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            let (y5, err) = if ok {
                let mut y5 = r.off;
                let mut e = Cx::new(0.0, 0.0);
                for s in 0..7 {
                    y5 += k[s] * (B5[s] * step);
                    e += k[s] * ((B5[s] - B4[s]) * step);
                }
                (y5, e.norm() / (ctl.rtol * (1.0 + r.zeta(model).norm())))
            } else {
                (r.off, f64::INFINITY)
            };
            if err <= 1.0 {
                u += step;
                let q = Cx::new(q0, u);
                r = newton_complex(model, q, n, LocalRoot { idx: r.idx, off: y5 })
                    .map_err(|e| Error::Convergence(format!("root {n} at u={u}: {e}")))?;
                r = reanchor(model, n, r);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = step * fac;
            } else {
                h = step * (0.9 * err.powf(-0.25)).clamp(0.1, 0.5);
                if h < ctl.h_min {
                    return Err(Error::Stiffness(format!("root {n}: step below {} at u={u}", ctl.h_min)));
                }
            }
        }
        let q = Cx::new(q0, u);
        worst = worst.max((q + model.g(r.idx, r.off)).norm() / (1.0 + q.norm()));
        out.push(r);
    }
    Ok((out, worst))
}

fn out_grid(u0: f64, u1: f64, ctl: &StepControl) -> Vec<f64> {
    let mut outs = vec![u0];
    let mut u = u0;
    while u < u1 {
        u = (u + ctl.du_out + ctl.du_rel * u).min(u1);
        outs.push(u);
    }
    outs
}

fn check_collisions(paths: &[Vec<Cx>], ids: &[RootId], outs: &[f64], from: usize, tol: f64) -> Result<()> {
    for (j, u) in outs.iter().enumerate().skip(from) {
        let mut pts: Vec<(Cx, usize)> = paths.iter().enumerate().map(|(i, p)| (p[j], i)).collect();
        pts.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                if pts[b].0.re - pts[a].0.re > tol {
                    break;
                }
                if (pts[b].0 - pts[a].0).norm() < tol {
                    return Err(Error::Collision(format!("roots {} and {} within {tol} at u={u}", ids[pts[a].1], ids[pts[b].1])));
                }
            }
        }
    }
    Ok(())
}

/// Trace every root of `grid` from u = 0 to u_max along q₀ + iu.
pub fn continue_complex_q(model: &ProcessModel, grid: &RootGrid, u_max: f64, ctl: &StepControl) -> Result<ComplexRootPath> {
    if !(u_max > 0.0) || !(ctl.du_out > 0.0) || !(ctl.du_rel >= 0.0) {
        return Err(Error::Domain(format!("u_max and the output spacing must be positive (u_max={u_max})")));
    }
    let n = grid.n;
    let mut local = Vec::with_capacity(2 * n + 2);
    local.extend((0..=n).rev().map(|k| vec![grid.neg.roots[k]]));
    local.extend((0..=n).map(|k| vec![grid.pos.roots[k]]));
    let mut ids: Vec<RootId> = (1..=n).rev().map(RootId::Neg).collect();
    ids.push(RootId::ZeroMinus);
    ids.push(RootId::ZeroPlus);
    ids.extend((1..=n).map(RootId::Pos));
    let mut path = ComplexRootPath {
        q0: grid.q,
        u_grid: vec![0.0],
        ids,
        paths: vec![Vec::new(); 2 * n + 2],
        max_residual: vec![0.0; 2 * n + 2],
        model: *model,
        local,
        n,
    };
    for i in 0..2 * n + 2 {
        let (m, sgn) = path.side(i);
        path.paths[i].push(path.local[i][0].zeta(&m) * sgn);
    }
    path.extend(u_max, ctl)?;
    Ok(path)
}

impl ComplexRootPath {
    /// Model of path i (in local order) and the sign taking its ζ to the model's coordinates.
    fn side(&self, i: usize) -> (ProcessModel, f64) {
        if i > self.n {
            (self.model, 1.0)
        } else {
            (self.model.mirror(), -1.0)
        }
    }

    /// Continue every path from the current end to u_max.
    pub fn extend(&mut self, u_max: f64, ctl: &StepControl) -> Result<()> {
        let start = *self.u_grid.last().unwrap();
        if u_max <= start {
            return Ok(());
        }
        let outs = out_grid(start, u_max, ctl);
        let n = self.n;
        let traced: Vec<(Vec<LocalRoot>, f64)> = (0..2 * n + 2)
            .into_par_iter()
            .map(|i| {
                let k = if i > n { i - n - 1 } else { n - i };
                trace(&self.side(i).0, k, *self.local[i].last().unwrap(), self.q0, &outs, ctl)
            })
            .collect::<Result<_>>()?;
        for (i, (rs, w)) in traced.into_iter().enumerate() {
            let (m, sgn) = self.side(i);
            self.paths[i].extend(rs[1..].iter().map(|r| r.zeta(&m) * sgn));
            self.local[i].extend_from_slice(&rs[1..]);
            self.max_residual[i] = self.max_residual[i].max(w);
        }
        let from = self.u_grid.len();
        self.u_grid.extend_from_slice(&outs[1..]);
        check_collisions(&self.paths, &self.ids, &self.u_grid, from, ctl.collision_tol)
    }

    /// Positive and negative half root sets at output point j, for factor evaluation.
    pub(crate) fn halves_at(&self, j: usize) -> (HalfRoots, HalfRoots) {
        let q = Cx::new(self.q0, self.u_grid[j]);
        let n = self.n;
        let mir = self.model.mirror();
        // local order: neg n..1, 0-, 0+, pos 1..n
        let neg: Vec<LocalRoot> = (0..=n).map(|k| self.local[n - k][j]).collect();
        let pos: Vec<LocalRoot> = (0..=n).map(|k| self.local[n + 1 + k][j]).collect();
        let mk = |m: ProcessModel, roots| HalfRoots { model: m, q, roots, expansion: asymptotics::expansion(&m, q) };
        (mk(self.model, pos), mk(mir, neg))
    }

    /// One half root set at any u in [0, u_max]: each root starts from the
    /// nearest output point, takes one RK4 step along dζ/du to u and is
    /// polished by Newton. The polish has to stay small, which certifies that
    /// the root was not swapped for a neighbour.
    pub(crate) fn half_near(&self, u: f64, positive: bool) -> Result<HalfRoots> {
        let last = *self.u_grid.last().unwrap();
        if !(0.0..=last).contains(&u) {
            return Err(Error::Domain(format!("u={u} outside the traced range [0, {last}]")));
        }
        let j = match self.u_grid.binary_search_by(|v| v.total_cmp(&u)) {
            Ok(j) => j,
            Err(j) if j == 0 => 0,
            Err(j) if j >= self.u_grid.len() => self.u_grid.len() - 1,
            Err(j) => if u - self.u_grid[j - 1] <= self.u_grid[j] - u { j - 1 } else { j },
        };
        let du = u - self.u_grid[j];
        let q = Cx::new(self.q0, u);
        let n = self.n;
        let model = if positive { self.model } else { self.model.mirror() };
        let roots: Vec<LocalRoot> = (0..=n)
            .into_par_iter()
            .map(|k| {
                let i = if positive { n + 1 + k } else { n - k };
                let r = self.local[i][j];
                if du == 0.0 {
                    return Ok(r);
                }
                let f = |off: Cx| Cx::new(0.0, -1.0) / model.g_dg(r.idx, off).1;
                let k1 = f(r.off);
                let k2 = f(r.off + k1 * (0.5 * du));
                let k3 = f(r.off + k2 * (0.5 * du));
                let k4 = f(r.off + k3 * du);
                let pred = r.off + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (du / 6.0);
                let p = LocalRoot { idx: r.idx, off: pred };
                let z = newton_complex(&model, q, k, p)?;
                let moved = (z.zeta(&model) - p.zeta(&model)).norm();
                if !(moved <= 1e-4 * (1.0 + z.zeta(&model).norm())) {
                    return Err(Error::Convergence(format!(
                        "root {k} at u={u}: Newton moved the prediction by {moved:.2e}; trace with a finer output spacing"
                    )));
                }
                Ok(z)
            })
            .collect::<Result<_>>()?;
        Ok(HalfRoots { model, q, roots, expansion: asymptotics::expansion(&model, q) })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,n,re_zeta,im_zeta\n");
        for (j, u) in self.u_grid.iter().enumerate() {
            for (i, id) in self.ids.iter().enumerate() {
                let z = self.paths[i][j];
                s.push_str(&format!("{:.17e},{},{:.17e},{:.17e}\n", u, id, z.re, z.im));
            }
        }
        s
    }
}
