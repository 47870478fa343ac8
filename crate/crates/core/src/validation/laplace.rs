//! q ∫₀^∞ e^{−qt} p_t(x) dt against the exponential-time series.

use crate::distributions::{sup_density_auto, sup_density_fixed_t, InversionParams};
use crate::error::{Error, Result};
use crate::models::ProcessModel;
use crate::roots::solve_real_q;
use serde::Serialize;

/// Step in ln(qt).
const H: f64 = 0.5;
const T_MIN: f64 = 0.01;
const T_MAX: f64 = 25.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceCheck {
    pub q: f64,
    pub x: Vec<f64>,
    /// From the fixed-t inversions.
    pub transformed: Vec<f64>,
    /// p^S(q, x) from the series.
    pub direct: Vec<f64>,
    pub abs_error: Vec<f64>,
    /// |rule − rule at step 2H|, a pessimistic bound on the quadrature in t.
    pub quadrature_bound: Vec<f64>,
    /// Times at which p_t was computed, with its values (rows follow `x`).
    pub t: Vec<f64>,
    pub p_t: Vec<Vec<f64>>,
}

/// Trapezoid rule in v = ln(qt) on [ln 0.01, ln 25]. Below the first node
/// p_t is continued proportionally to t (its small-time behaviour: one
/// jump or the onset of the Lévy density) and that piece is summed in
/// closed form. Each node is inverted to a tolerance
/// divided by its weight qt (small-t nodes count for little), with u_max
/// raised to 100/t so the algebraic tail fit can be reached.
pub fn laplace_check(model: &ProcessModel, q: f64, x: &[f64], params: &InversionParams) -> Result<LaplaceCheck> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("need q > 0, got {q}")));
    }
    let nodes = ((T_MAX / T_MIN).ln() / H).ceil() as usize + 1;
    let taus: Vec<f64> = (0..nodes).map(|k| T_MIN * (H * k as f64).exp()).collect();
    let times: Vec<f64> = taus.iter().map(|tau| tau / q).collect();
    let mut p_t = vec![Vec::with_capacity(nodes); x.len()];
    for (&t, &tau) in times.iter().zip(&taus) {
        let w = tau.min(1.0);
        let p = InversionParams {
            u_max: params.u_max.max(100.0 / t),
            envelope_tol: params.envelope_tol / w,
            tol: params.tol / w,
            ..params.clone()
        };
        let r = sup_density_fixed_t(model, t, x, None, &p)?;
        for (row, v) in p_t.iter_mut().zip(&r.density) {
            row.push(*v);
        }
    }
    let rule = |row: &[f64], stride: usize| -> f64 {
        let h = H * stride as f64;
        let g: Vec<f64> = (0..nodes).step_by(stride).map(|k| taus[k] * (-taus[k]).exp() * row[k]).collect();
        let r = (-2.0 * h).exp();
        h * g.iter().sum::<f64>() + h * g[0] * r / (1.0 - r)
    };
    let grid = solve_real_q(model, q, 100)?;
    let dens = sup_density_auto(model, &grid, 1e-9)?;
    let direct: Vec<f64> = x.iter().map(|v| dens.density(*v)).collect();
    let transformed: Vec<f64> = p_t.iter().map(|row| rule(row, 1)).collect();
    let quadrature_bound = p_t.iter().zip(&transformed).map(|(row, v)| (rule(row, 2) - v).abs()).collect();
    let abs_error = transformed.iter().zip(&direct).map(|(a, b)| (a - b).abs()).collect();
    Ok(LaplaceCheck { q, x: x.to_vec(), transformed, direct, abs_error, quadrature_bound, t: times, p_t })
}
