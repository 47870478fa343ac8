//! Direct Lévy–Khintchine quadrature, kept independent of the closed forms.

use super::{Cx, ProcessModel};
use crate::error::{Error, Result};
use crate::quad::{adaptive, tanh_sinh_from_zero};

const TARGET: f64 = 1e-8;

/// (e^{iw} − 1 − iw)/w², without cancellation for small w.
fn kernel_over_w2(w: f64) -> Cx {
    if w.abs() < 0.1 {
        let iw = Cx::new(0.0, w);
        let mut term = Cx::new(-0.5, 0.0);
        let mut sum = term;
        for k in 3..20 {
            term *= iw / k as f64;
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        Cx::new(w.cos() - 1.0, w.sin() - w) / (w * w)
    }
}

/// One half-line of the jump measure: y²ν at |x| = y and the exponential decay rate.
struct HalfLine<'a> {
    dens: Box<dyn Fn(f64) -> f64 + 'a>,
    rate: f64,
}

fn half_lines(model: &ProcessModel) -> [HalfLine<'_>; 2] {
    match model {
        ProcessModel::SechPoisson(m) => {
            let a = m.alpha;
            let d = move |s: f64| move |y: f64| 2.0 * y * y * ((s * a - 1.0) * y).exp() / (1.0 + (-2.0 * y).exp());
            [
                HalfLine { dens: Box::new(d(1.0)), rate: 1.0 - a },
                HalfLine { dens: Box::new(d(-1.0)), rate: 1.0 + a },
            ]
        }
        ProcessModel::SinhSquare(m) => {
            let a = m.alpha;
            let d = move |s: f64| {
                move |y: f64| {
                    let r = if y < 1e-300 { 1.0 } else { y / -(-y).exp_m1() };
                    4.0 * ((s * a - 1.0) * y).exp() * r * r
                }
            };
            [
                HalfLine { dens: Box::new(d(1.0)), rate: 1.0 - a },
                HalfLine { dens: Box::new(d(-1.0)), rate: 1.0 + a },
            ]
        }
        ProcessModel::BetaFamily(m) => {
            let d = |c: f64, al: f64, be: f64, la: f64| {
                move |y: f64| {
                    if c == 0.0 {
                        return 0.0;
                    }
                    let r = if y < 1e-300 { 1.0 / be } else { y / -(-be * y).exp_m1() };
                    c * (-al * be * y).exp() * r.powf(la) * y.powf(2.0 - la)
                }
            };
            [
                HalfLine { dens: Box::new(d(m.c1, m.alpha1, m.beta1, m.lambda1)), rate: m.alpha1 * m.beta1 },
                HalfLine { dens: Box::new(d(m.c2, m.alpha2, m.beta2, m.lambda2)), rate: m.alpha2 * m.beta2 },
            ]
        }
    }
}

/// Ψ(z) for real z straight from ½σ²z² − iμz − ∫(e^{izx} − 1 − izh(x))ν(dx).
///
/// h ≡ 0 for the sech family and h(x) = x otherwise. The x = 0 end of each
/// half-line is handled by a tanh–sinh rule, which tolerates the algebraic
/// blow-up of ν there; the kernel is carried as (e^{iw}−1−iw)/w² against y²ν
/// so that the leading Taylor behaviour cancels analytically.
pub fn psi_lk_quadrature(model: &ProcessModel, z: Cx) -> Result<Cx> {
    if z.im != 0.0 || !z.re.is_finite() {
        return Err(Error::Domain(format!("Lévy–Khintchine oracle needs real z, got {z}")));
    }
    let z = z.re;
    if z == 0.0 {
        return Ok(Cx::new(0.0, 0.0));
    }
    let compensated = !matches!(model, ProcessModel::SechPoisson(_));
    let (sigma, mu) = match model {
        ProcessModel::SechPoisson(_) => (0.0, 0.0),
        ProcessModel::SinhSquare(m) => (m.sigma, m.mu),
        ProcessModel::BetaFamily(m) => (m.sigma, m.mu),
    };
    let mut integral = Cx::new(0.0, 0.0);
    for (side, hl) in half_lines(model).iter().enumerate() {
        let s = if side == 0 { z } else { -z };
        let f = |y: f64| {
            let w = s * y;
            let k = kernel_over_w2(w) * (s * s);
            let k = if compensated { k } else { k + Cx::new(0.0, s / y) };
            k * (hl.dens)(y)
        };
        let split = (1.0 / z.abs()).min(1.0);
        let far = 45.0 / hl.rate;
        let (head, _) = tanh_sinh_from_zero(&f, split, 0.2 * TARGET)?;
        let (tail, _) = adaptive(&f, split, far.max(2.0 * split), 0.2 * TARGET, 4000)?;
        integral += head + tail;
    }
    Ok(Cx::new(0.5 * sigma * sigma * z * z, -mu * z) - integral)
}
