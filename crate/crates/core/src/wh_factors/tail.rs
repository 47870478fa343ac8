//! Tails of the factor products, Π_{n>K} (1+s/p_n)/(1+s/ζ_n).

use crate::roots::Strand;
use crate::specfun::{hurwitz_run, hurwitz_zeta, lgamma_diff};
use num_complex::Complex64 as Cx;

fn c(re: f64) -> Cx {
    Cx::new(re, 0.0)
}


/// Euler–Maclaurin estimate of Σ_{n≥N} (n+z₁)^{−a₁}(n+z₂)^{−a₂}, as a closed
/// expression: the integral expanded in (z₂−z₁)/(z₁+N) plus the first two
/// correction terms. Needs a₁ + a₂ > 1.
pub fn f_euler_maclaurin(a1: f64, a2: f64, z1: Cx, z2: Cx, n: f64) -> Cx {
    let x1 = z1 + n;
    let x2 = z2 + n;
    let d = z2 - z1;
    let mut sum = Cx::new(0.0, 0.0);
    let mut bin = 1.0;
    let mut dk = c(1.0);
    for k in 0..400 {
        let kf = k as f64;
        let t = dk * bin / (a1 + a2 + kf - 1.0) * (x1.ln() * (1.0 - a1 - a2 - kf)).exp();
        sum += t;
        if k > 0 && t.norm() < 1e-16 * sum.norm().max(1e-300) {
            break;
        }
        bin *= (-a2 - kf) / (kf + 1.0);
        dk *= d;
    }
    let edge = (x1.ln() * -a1).exp() * (x2.ln() * -a2).exp() * (0.5 + a1 / (12.0 * x1) + a2 / (12.0 * x2));
    sum + edge
}

/// Σ_{n≥N} (n+z₁)^{−a₁}(n+z₂)^{−a₂} by expanding around z₁ and summing Hurwitz zetas.
/// Exact up to rounding when |z₂−z₁| < |N+z₁|.
pub fn f_hurwitz(a1: f64, a2: f64, z1: Cx, z2: Cx, n: f64) -> Cx {
    let x = z1 + n;
    let d = z2 - z1;
    let mut sum = Cx::new(0.0, 0.0);
    let mut bin = 1.0;
    let mut dk = c(1.0);
    for k in 0..400 {
        let kf = k as f64;
        let t = dk * bin * hurwitz_zeta(a1 + a2 + kf, x);
        sum += t;
        if t.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
        bin *= (-a2 - kf) / (kf + 1.0);
        dk *= d;
    }
    sum
}

/// Multiplicative tail Π_{n≥N} (1+z/(n+α))/(1+z/ζ_n) for roots
/// ζ_n = n+β+A₁/(n+β)+A₂/(n+β)²+O(n⁻³): a gamma ratio times an exponential
/// of Euler–Maclaurin sums. The remainder is O(N⁻³).
pub fn accelerate_tail(n: usize, z: Cx, alpha: f64, a1: Cx, a2: Cx, beta: f64) -> Cx {
    let nf = n as f64;
    let g = lgamma_diff(c(nf + beta), z) - lgamma_diff(c(nf + alpha), z);
    let b = c(beta);
    let e = a1 * (f_euler_maclaurin(1.0, 1.0, b, b, nf) - f_euler_maclaurin(1.0, 1.0, z + b, b, nf))
        + a2 * (f_euler_maclaurin(1.0, 2.0, b, b, nf) - f_euler_maclaurin(1.0, 2.0, z + b, b, nf));
    (g + e).exp()
}

/// Σ_{k≥M} y^{−P}[y^{−m} − (y+w)^{−m}], y = k+b, via the binomial series in w/y.
/// The k = 0 pieces cancel analytically, so every zeta has order > 1.
fn d_sum(p: f64, m: u32, w: Cx, x: f64) -> (Cx, f64) {
    let mf = m as f64;
    let mut sum = Cx::new(0.0, 0.0);
    let mut bin = 1.0;
    let mut wk = c(1.0);
    let mut last = f64::INFINITY;
    let r = w.norm() / x;
    let count = if r < 1.0 { ((1e-18f64.ln() / r.ln()).ceil() as usize + 2).min(2000) } else { 2000 };
    let h = hurwitz_run(p + mf + 1.0, x, count);
    for k in 1..=count {
        let kf = k as f64;
        bin *= (-mf - (kf - 1.0)) / kf;
        wk *= w;
        let t = wk * bin * h[k - 1];
        sum -= t;
        last = t.norm();
        if last < 1e-18 * sum.norm().max(1e-300) || last < 1e-300 {
            break;
        }
    }
    (sum, last)
}

/// Powers of δ = Σ c_j y^{−p_j}, as (exponent, coefficient) lists.
fn delta_powers(terms: &[(f64, Cx)], y: f64, mmax: usize) -> Vec<Vec<(f64, Cx)>> {
    let keep = |p: f64, c: Cx| c.norm() * y.powf(-p) > 1e-20;
    let mut out: Vec<Vec<(f64, Cx)>> = vec![terms.to_vec()];
    for _ in 1..mmax {
        let prev = out.last().unwrap();
        let mut next: Vec<(f64, Cx)> = Vec::new();
        for (p1, c1) in prev {
            for (p2, c2) in terms {
                let (p, cc) = (p1 + p2, c1 * c2);
                if !keep(p, cc) {
                    continue;
                }
                match next.iter_mut().find(|t| (t.0 - p).abs() < 1e-12) {
                    Some(t) => t.1 += cc,
                    None => next.push((p, cc)),
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.push(next);
    }
    out
}

/// ln Π_{k≥M} (1+w/(k+a))/(1+w/(k+b+δ_k)) along one strand, w already
/// divided by the strand scale. Returns the value and a size estimate of
/// what was dropped.
pub(crate) fn strand_log_tail(strand: &Strand, m_start: i64, w: Cx) -> (Cx, f64) {
    let x = m_start as f64 + strand.b;
    let xa = m_start as f64 + strand.a;
    let mut total = lgamma_diff(c(x), w) - lgamma_diff(c(xa), w);
    let dsize: f64 = strand.terms.iter().map(|(p, cc)| cc.norm() * x.powf(-p)).sum();
    if dsize == 0.0 {
        return (total, 0.0);
    }
    let mut mmax = 1;
    while dsize.powi(mmax as i32) / (mmax as f64) > 1e-18 && mmax < 60 {
        mmax += 1;
    }
    let pows = delta_powers(&strand.terms, x, mmax);
    let mut dropped: f64 = 0.0;
    for (mi, list) in pows.iter().enumerate() {
        let m = (mi + 1) as u32;
        let sgn = if m % 2 == 1 { 1.0 } else { -1.0 } / m as f64;
        for (p, cc) in list {
            let (v, last) = d_sum(*p, m, w, x);
            total += cc * v * sgn;
            dropped = dropped.max(cc.norm() * last);
        }
    }
    let next = dsize.powi(mmax as i32 + 1) * w.norm() / x.powi(2);
    (total, dropped.max(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_sum_matches_direct_summation() {
        let b = c(0.3);
        let n = 50.0;
        let mut direct = 0.0;
        let mut k = n;
        while k < 2e6 {
            direct += 1.0 / ((k + 0.3) * (k + 0.3));
            k += 1.0;
        }
        // integral tail of the remainder
        direct += 1.0 / (k + 0.3) - 0.5 / ((k + 0.3) * (k + 0.3));
        let f = f_hurwitz(1.0, 1.0, b, b, n);
        assert!((f.re - direct).abs() < 1e-12, "{} vs {direct}", f.re);
        let e = f_euler_maclaurin(1.0, 1.0, b, b, n);
        assert!((e.re - direct).abs() < 1e-8);
        let z1 = Cx::new(1.3, 0.5);
        let (h, em) = (f_hurwitz(1.0, 2.0, z1, b, n), f_euler_maclaurin(1.0, 2.0, z1, b, n));
        assert!((h - em).norm() < 10.0 * n.powi(-6));
        let r = f_euler_maclaurin(1.0, 2.0, b, b, n);
        assert!(r.re > 0.0 && r.im == 0.0);
    }

    #[test]
    fn strand_tail_is_a_product_tail() {
        let s = Strand {
            stride: 1,
            rem: 0,
            scale: 1.0,
            a: 0.25,
            b: 0.25,
            terms: vec![(1.0, c(2.0)), (2.0, c(-3.0))],
        };
        let w = Cx::new(0.7, -1.1);
        let m = 40;
        let (v, _) = strand_log_tail(&s, m, w);
        let mut direct = Cx::new(0.0, 0.0);
        for k in m..4_000_000 {
            let p = k as f64 + 0.25;
            let z = s.root(k);
            direct += crate::specfun::ln_1p(w / p) - crate::specfun::ln_1p(w / z);
        }
        assert!((v - direct).norm() < 1e-9, "{v} vs {direct}");
        assert_eq!(strand_log_tail(&s, m, c(0.0)).0, c(0.0));
    }
}
