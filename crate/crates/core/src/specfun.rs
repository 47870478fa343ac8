//! Complex log-gamma, digamma and beta functions, and a real Gauss
//! hypergeometric series.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub type ComplexScalar = Complex64;
type C = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_2, B_4, ..., B_40.
pub(crate) const BERNOULLI: [f64; 20] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
];

// Zero of digamma on the positive axis, split into high and low parts.
const PSI_ZERO_HI: f64 = 1.461_632_144_968_362_2;
const PSI_ZERO_LO: f64 = 9.549_995_429_965_697e-17;

fn check_finite(z: C, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-finite argument {z}")))
    }
}

pub(crate) fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// sin(πz), reducing Re z modulo 2 first so that integers stay exact.
pub(crate) fn sin_pi(z: C) -> C {
    let r = z.re - 2.0 * (0.5 * z.re).round();
    (C::new(r, z.im) * PI).sin()
}

pub(crate) fn cos_pi(z: C) -> C {
    let r = z.re - 2.0 * (0.5 * z.re).round();
    (C::new(r, z.im) * PI).cos()
}

pub(crate) fn sin_pi_real(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    (PI * r).sin()
}

/// cot(πz), overflow-safe for large |Im z|.
pub(crate) fn cot_pi(z: C) -> C {
    if z.im.abs() < 20.0 {
        return cos_pi(z) / sin_pi(z);
    }
    let r = z.re - (z.re).round();
    let w = C::new(r, z.im) * PI;
    // cot w = i (e^{2iw}+1)/(e^{2iw}-1), pick the decaying exponential
    if z.im > 0.0 {
        let e = (C::i() * 2.0 * w).exp();
        C::i() * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-C::i() * 2.0 * w).exp();
        C::i() * (1.0 + e) / (1.0 - e)
    }
}

fn zeta_table() -> &'static [f64; 40] {
    static T: OnceLock<[f64; 40]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [0.0; 40];
        for (k, v) in t.iter_mut().enumerate().skip(2) {
            *v = hurwitz_zeta(k as f64, C::new(1.0, 0.0)).re;
        }
        t
    })
}

/// Hurwitz zeta Σ_{n≥0} (n+x)^{-s} for real s > 1 and Re x > 0,
/// by direct summation followed by Euler–Maclaurin.
pub(crate) fn hurwitz_zeta(s: f64, x: C) -> C {
    let target = 20.0_f64.max(s);
    let mut sum = C::new(0.0, 0.0);
    let mut y = x;
    while y.norm() < target || y.re < 1.0 {
        sum += (-s * y.ln()).exp();
        y += 1.0;
    }
    let ly = y.ln();
    let ys = (-s * ly).exp();
    sum += ys * y / (s - 1.0) + ys * 0.5;
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * y^{-s-2j+1}
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut poch = s;
    let mut fact = 2.0;
    let mut pw = ys * inv;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = pw * (b * poch / fact);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        let k = 2.0 * (j as f64 + 1.0);
        poch *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        pw *= inv2;
    }
    sum
}

/// ζ(s₀+k, x) for k = 0..count at real x > 0, sharing the powers of x.
pub(crate) fn hurwitz_run(s0: f64, x: f64, count: usize) -> Vec<f64> {
    let target = 20.0_f64.max(s0 + count as f64);
    let mut out = vec![0.0; count];
    let mut y = x;
    while y < target || y < 1.0 {
        let inv = 1.0 / y;
        let mut r = y.powf(-s0);
        for v in out.iter_mut() {
            *v += r;
            r *= inv;
        }
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut ys = y.powf(-s0);
    for (k, v) in out.iter_mut().enumerate() {
        let s = s0 + k as f64;
        let mut sum = ys * y / (s - 1.0) + ys * 0.5;
        let mut poch = s;
        let mut fact = 2.0;
        let mut pw = ys * inv;
        for (j, b) in BERNOULLI.iter().enumerate() {
            let term = pw * (b * poch / fact);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            let m = 2.0 * (j as f64 + 1.0);
            poch *= (s + m - 1.0) * (s + m);
            fact *= (m + 1.0) * (m + 2.0);
            pw *= inv2;
        }
        *v += sum;
        ys *= inv;
    }
    out
}

/// Principal-branch log-gamma (continuous off the negative real axis).
pub fn log_gamma(z: ComplexScalar) -> Result<ComplexScalar> {
    check_finite(z, "log_gamma")?;
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("log_gamma at {}", z.re)));
    }
    Ok(lgamma(z))
}

pub(crate) fn lgamma(z: C) -> C {
    if z.im < 0.0 {
        return lgamma(z.conj()).conj();
    }
    if z.re < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z), with the branch of
        // ln sin chosen so that the result is continuous.
        let ls = ln_sin_pi_principal(z);
        let shift = 2.0 * PI * (0.5 * z.re + 0.25).floor();
        let r = -lgamma(1.0 - z) + LN_PI - ls;
        return C::new(r.re, r.im + shift);
    }
    let e1 = z - 1.0;
    if e1.norm() < 0.2 {
        return lgamma_one_plus(e1);
    }
    let e2 = z - 2.0;
    if e2.norm() < 0.2 {
        return lgamma_one_plus(e2) + ln_1p(e2);
    }
    let mut acc = C::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        acc += w.ln();
        w += 1.0;
    }
    stirling(w) - acc
}

pub(crate) fn ln_1p(z: C) -> C {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        z - z2 / 2.0 + z2 * z / 3.0 - z2 * z2 / 4.0
    } else {
        (1.0 + z).ln()
    }
}

// Principal log of sin(πz) for Im z ≥ 0, safe for large Im z.
fn ln_sin_pi_principal(z: C) -> C {
    let v = if z.im < 20.0 {
        sin_pi(z).ln()
    } else {
        let r = z.re - 2.0 * (0.5 * z.re).round();
        let w = C::new(r, z.im) * PI;
        // sin w = e^{-iw}(1 - e^{2iw}) / (2i)
        -C::i() * w + C::new(-(2.0_f64.ln()), PI / 2.0) + ln_1p(-(C::i() * 2.0 * w).exp())
    };
    let mut im = v.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    C::new(v.re, im)
}

fn stirling(w: C) -> C {
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = C::new(0.0, 0.0);
    let mut pw = inv;
    for (j, b) in BERNOULLI.iter().take(10).enumerate() {
        let k = 2.0 * (j as f64 + 1.0);
        series += pw * (b / (k * (k - 1.0)));
        pw *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series
}

// ln Γ(1+e) = −γe + Σ_{k≥2} (−1)^k ζ(k) e^k / k, |e| small.
fn lgamma_one_plus(e: C) -> C {
    let zt = zeta_table();
    let mut sum = C::new(-EULER_GAMMA, 0.0) * e;
    let mut pw = -e;
    for (k, zk) in zt.iter().enumerate().skip(2) {
        pw *= -e;
        let term = pw * (zk / k as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// ln Γ(z+d) − ln Γ(z) for Re z ≥ 0.5, accurate when |z| is large.
pub(crate) fn lgamma_diff(z: C, d: C) -> C {
    if z.norm() < 30.0 || (z + d).norm() < 30.0 || (z + d).re < 0.5 {
        return lgamma(z + d) - lgamma(z);
    }
    let l = ln_1p(d / z);
    let zd = z + d;
    let mut corr = C::new(0.0, 0.0);
    let (iz, izd) = (1.0 / z, 1.0 / zd);
    let (iz2, izd2) = (iz * iz, izd * izd);
    let (mut pz, mut pzd) = (iz, izd);
    for (j, b) in BERNOULLI.iter().take(8).enumerate() {
        let k = 2.0 * (j as f64 + 1.0);
        corr += (pzd - pz) * (b / (k * (k - 1.0)));
        pz *= iz2;
        pzd *= izd2;
    }
    d * z.ln() + (zd - 0.5) * l - d + corr
}

/// Γ(x) for real x, sign included.
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin_pi_real(x) * gamma_real(1.0 - x))
    } else {
        lgamma(C::new(x, 0.0)).re.exp()
    }
}

/// Digamma ψ(z) = d/dz ln Γ(z).
pub fn digamma(z: ComplexScalar) -> Result<ComplexScalar> {
    check_finite(z, "digamma")?;
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("digamma at {}", z.re)));
    }
    Ok(psi(z))
}

fn psi_root_coeffs() -> &'static [f64; 30] {
    static T: OnceLock<[f64; 30]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [0.0; 30];
        let x0 = C::new(PSI_ZERO_HI, 0.0);
        for (k, v) in t.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *v = sign * hurwitz_zeta(k as f64 + 1.0, x0).re;
        }
        t
    })
}

pub(crate) fn psi(z: C) -> C {
    if z.re < 0.5 {
        return psi(1.0 - z) - cot_pi(z) * PI;
    }
    let d = z - PSI_ZERO_HI - PSI_ZERO_LO;
    if d.norm() < 0.3 {
        let c = psi_root_coeffs();
        let mut sum = C::new(0.0, 0.0);
        for k in (1..30).rev() {
            sum = (sum + c[k]) * d;
        }
        return sum;
    }
    let mut acc = C::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 10.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = C::new(0.0, 0.0);
    let mut pw = inv2;
    for (j, b) in BERNOULLI.iter().take(12).enumerate() {
        let k = 2.0 * (j as f64 + 1.0);
        series += pw * (b / k);
        pw *= inv2;
    }
    acc + w.ln() - inv * 0.5 - series
}

/// Trigamma ψ′(z); internal helper for the derivative of the λ=2
/// beta-family exponent.
pub(crate) fn trigamma(z: C) -> C {
    if z.re < 0.5 {
        let s = sin_pi(z);
        return C::new(PI * PI, 0.0) / (s * s) - trigamma(1.0 - z);
    }
    let mut acc = C::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 10.0 {
        acc += 1.0 / (w * w);
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = C::new(0.0, 0.0);
    let mut pw = inv2 * inv;
    for b in BERNOULLI.iter().take(12) {
        series += pw * *b;
        pw *= inv2;
    }
    acc + inv + inv2 * 0.5 + series
}

/// ψ′(x) for real x > 0 by the series Σ 1/(n+x)² (direct head plus
/// Euler–Maclaurin tail).
pub(crate) fn trigamma_real(x: f64) -> f64 {
    hurwitz_zeta(2.0, C::new(x, 0.0)).re
}

/// Beta function B(x;y) = Γ(x)Γ(y)/Γ(x+y).
pub fn beta_fn(x: ComplexScalar, y: ComplexScalar) -> Result<ComplexScalar> {
    check_finite(x, "beta_fn")?;
    check_finite(y, "beta_fn")?;
    if is_nonpositive_integer(x) || is_nonpositive_integer(y) {
        return Err(Error::Pole(format!("beta_fn({x}, {y})")));
    }
    if is_nonpositive_integer(x + y) {
        return Ok(C::new(0.0, 0.0));
    }
    Ok((lgamma(x) + lgamma(y) - lgamma(x + y)).exp())
}

/// Gauss ₂F₁(a,b;c;x) for 0 ≤ x < 1 by its power series.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    gauss_2f1_capped(a, b, c, x, 1_000_000)
}

/// Closest approach to x = 1 that the series is asked to handle.
pub const GAUSS_2F1_X_MAX: f64 = 1.0 - 1e-6;

pub fn gauss_2f1_capped(a: f64, b: f64, c: f64, x: f64, cap: usize) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && x.is_finite()) {
        return Err(Error::Domain("gauss_2f1: non-finite argument".into()));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("gauss_2f1: x={x} outside [0,1)")));
    }
    if c <= 0.0 && c == c.round() {
        return Err(Error::Pole(format!("gauss_2f1: c={c}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x > GAUSS_2F1_X_MAX {
        return Err(Error::Convergence(format!(
            "gauss_2f1: x={x} beyond the floor {GAUSS_2F1_X_MAX}"
        )));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..cap {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-15 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "gauss_2f1({a},{b},{c},{x}) needs more than {cap} terms"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    // (re, im, lnΓ re, lnΓ im, ψ re, ψ im) from a 40-digit evaluation.
    const REF: [(f64, f64, f64, f64, f64, f64); 10] = [
        (0.3, 0.7, -0.093170312498134180893, -1.22395736571368873, -0.44720792029956117395, 1.8918108552185266687),
        (2.5, -3.1, -1.5697013005045923013, -2.9518901418326683252, 1.3041679242724926284, -0.99501189383656267975),
        (-4.3, 0.2, -2.5402514644485927211, -15.009352527003275748, 2.9243837102082605675, 2.2555165386680425923),
        (-0.7, -12.0, -20.914155202460050193, -15.87746297812407879, 2.4896006825224960932, -1.6705218439087970423),
        (12.0, 150.0, -177.06697984504181265, 619.21932553578907581, 5.013563760084870342, 1.494279061832446952),
        (-35.5, 40.0, -198.70454420472872307, 36.492279138467287736, 3.9855413672961413666, 2.3036257369340757045),
        (45.0, -190.0, -63.639528569506395087, -871.6706611526447497, 5.2737245466205600221, -1.3407321686548906714),
        (1.1, 0.05, -0.05166289147178149888, -0.02114900724441559749, -0.4214321749689775184, 0.071571119395608385659),
        (1.9, -0.1, -0.042421664818060422655, -0.035694707735681921227, 0.35847103610654941608, -0.06869842745442634208),
        (-2.5, 0.0, -0.056243716497674050673, -9.4247779607693797154, 1.1031566406452431872, 0.0),
    ];

    #[test]
    fn log_gamma_reference_points() {
        for &(re, im, lr, li, _, _) in REF.iter() {
            let v = log_gamma(c(re, im)).unwrap();
            assert!(rel(v, c(lr, li)) < 1e-13, "lnΓ({re},{im}) = {v}");
        }
    }

    #[test]
    fn digamma_reference_points() {
        for &(re, im, _, _, pr, pi) in REF.iter() {
            let v = digamma(c(re, im)).unwrap();
            assert!(rel(v, c(pr, pi)) < 1e-12, "ψ({re},{im}) = {v}");
        }
    }

    #[test]
    fn trivial_values() {
        assert!((log_gamma(c(5.0, 0.0)).unwrap().re - 24f64.ln()).abs() < 1e-14);
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-16);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-16);
        assert!((log_gamma(c(0.5, 0.0)).unwrap().re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((digamma(c(1.0, 0.0)).unwrap().re + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(c(2.0, 0.0)).unwrap().re - 1.0 + EULER_GAMMA).abs() < 1e-15);
        let h = digamma(c(0.5, 0.0)).unwrap().re;
        assert!((h + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(digamma(c(PSI_ZERO_HI, 0.0)).unwrap().norm() < 1e-16);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(digamma(c(-1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(f64::NAN, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(beta_fn(c(-1.0, 0.0), c(0.5, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn beta_values() {
        assert!((beta_fn(c(1.0, 0.0), c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((beta_fn(c(2.0, 0.0), c(3.0, 0.0)).unwrap() - 1.0 / 12.0).norm() < 1e-15);
        assert!((beta_fn(c(0.5, 0.0), c(0.5, 0.0)).unwrap() - PI).norm() < 1e-13);
        assert_eq!(beta_fn(c(0.5, 0.0), c(-1.5, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn hypergeometric_values() {
        assert_eq!(gauss_2f1(0.3, 1.7, 2.2, 0.0).unwrap(), 1.0);
        let v = gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-14);
        // 40-digit reference at the η=1/4 density parameters
        let v = gauss_2f1(0.3125, 0.8125, 0.625, 0.9).unwrap();
        assert!((v - 2.7031048680164902999).abs() < 1e-13 * v);
        assert!(matches!(
            gauss_2f1(1.0, 1.0, 0.5, 1.0 - 1e-9),
            Err(Error::Convergence(_))
        ));
        assert!(matches!(gauss_2f1_capped(1.0, 1.0, 0.5, 0.99, 10), Err(Error::Convergence(_))));
        assert!(matches!(gauss_2f1(1.0, 1.0, -2.0, 0.5), Err(Error::Pole(_))));
    }

    #[test]
    fn helpers_agree_with_definitions() {
        let z = c(0.37, -2.2);
        let d = lgamma_diff(c(80.3, 4.0), c(-0.7, 0.3));
        let direct = lgamma(c(79.6, 4.3)) - lgamma(c(80.3, 4.0));
        assert!((d - direct).norm() < 1e-11);
        let h = 1e-5;
        let fd = (psi(z + h) - psi(z - h)) / (2.0 * h);
        assert!((trigamma(z) - fd).norm() < 1e-8);
        assert!((trigamma_real(1.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((gamma_real(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(-1.5) - 4.0 / 3.0 * PI.sqrt()).abs() < 1e-13);
        let big = c(0.3, 400.0);
        assert!((cot_pi(big) + C::i()).norm() < 1e-15);
        assert!((hurwitz_zeta(3.0, c(1.0, 0.0)).re - 1.2020569031595942).abs() < 1e-15);
        for x in [0.3, 7.5, 1234.0] {
            let run = hurwitz_run(2.5, x, 40);
            for (k, v) in run.iter().enumerate() {
                let h = hurwitz_zeta(2.5 + k as f64, c(x, 0.0)).re;
                assert!((v - h).abs() <= 1e-13 * h.abs(), "x={x} k={k}: {v} vs {h}");
            }
        }
    }
}
