//! Quadrature rules shared by the oracles and the inversion code.

use crate::error::{Error, Result};
use num_complex::Complex64 as Cx;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 7/15 panel: (estimate, error bound).
pub(crate) fn gk15<F: Fn(f64) -> Cx>(f: &F, a: f64, b: f64) -> (Cx, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Globally adaptive Gauss–Kronrod on [a,b] to absolute tolerance `tol`.
pub(crate) fn adaptive<F: Fn(f64) -> Cx>(f: &F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<(Cx, f64)> {
    let (v, e) = gk15(f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let (total, err) = panels
            .iter()
            .fold((Cx::new(0.0, 0.0), 0.0), |(s, r), p| (s + p.2, r + p.3));
        if err <= tol {
            return Ok((total, err));
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature(format!(
                "error estimate {err:.3e} above {tol:.1e} after {max_panels} panels on [{a},{b}]"
            )));
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Tanh–sinh rule on [0, L] for integrands with an algebraic endpoint
/// singularity at 0. The integrand receives x measured from 0, so small
/// abscissae keep full relative precision.
pub(crate) fn tanh_sinh_from_zero<F: Fn(f64) -> Cx>(f: &F, len: f64, tol: f64) -> Result<(Cx, f64)> {
    let node = |t: f64| -> (f64, f64) {
        let u = 0.5 * PI * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // x/len = 1/(1+e^{-2u})
        let frac = if u >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let ch = (0.5 * PI * t.cosh()) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        (len * frac, 0.5 * len * ch)
    };
    let eval = |h: f64, offset: bool| -> Cx {
        let mut s = Cx::new(0.0, 0.0);
        let start = if offset { h } else { 0.0 };
        let step = if offset { 2.0 * h } else { h };
        let mut k = 0usize;
        loop {
            let t = start + step * k as f64;
            if t > 6.5 {
                break;
            }
            for sgn in [1.0, -1.0] {
                if t == 0.0 && sgn < 0.0 {
                    continue;
                }
                let (x, w) = node(sgn * t);
                if w < 1e-300 || x <= 0.0 || x >= len {
                    continue;
                }
                s += f(x) * w;
            }
            k += 1;
        }
        s
    };
    let mut h = 0.5;
    let mut sum = eval(h, false);
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        sum += eval(h, true);
        let cur = sum * h;
        let err = (cur - prev).norm();
        if err <= tol {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("tanh-sinh on [0,{len}] did not reach {tol:.1e}")))
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_and_tanh_sinh() {
        let f = |x: f64| Cx::new(x.cos(), x.sin());
        let (v, _) = adaptive(&f, 0.0, 10.0, 1e-12, 200).unwrap();
        assert!((v - Cx::new(10f64.sin(), 1.0 - 10f64.cos())).norm() < 1e-11);
        let g = |x: f64| Cx::new(x.powf(-0.7), 0.0);
        let (v, _) = tanh_sinh_from_zero(&g, 1.0, 1e-12).unwrap();
        assert!((v.re - 1.0 / 0.3).abs() < 1e-10);
    }
}
