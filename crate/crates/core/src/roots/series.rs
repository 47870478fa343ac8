//! Truncated power series in one variable, used to push the root
//! expansions past the two orders printed for them.

use crate::specfun::BERNOULLI;
use num_complex::Complex64 as Cx;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Series(pub Vec<Cx>);

impl Series {
    pub fn constant(c: Cx, len: usize) -> Series {
        let mut v = vec![Cx::new(0.0, 0.0); len];
        v[0] = c;
        Series(v)
    }

    /// The variable ε itself.
    pub fn var(len: usize) -> Series {
        let mut v = vec![Cx::new(0.0, 0.0); len];
        if len > 1 {
            v[1] = Cx::new(1.0, 0.0);
        }
        Series(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, c: Cx) -> Series {
        Series(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add_const(&self, c: Cx) -> Series {
        let mut s = self.clone();
        s.0[0] += c;
        s
    }

    /// Σ f_k s^k for a series s with vanishing constant term.
    pub fn compose(&self, f: &[Cx]) -> Series {
        debug_assert!(self.0[0].norm() == 0.0);
        let n = self.len();
        let mut out = Series::constant(f[0], n);
        let mut pw = Series::constant(Cx::new(1.0, 0.0), n);
        for fk in f.iter().skip(1).take(n - 1) {
            pw = &pw * self;
            out = &out + &pw.scale(*fk);
        }
        out
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.len();
        let mut v = vec![Cx::new(0.0, 0.0); n];
        for (i, a) in self.0.iter().enumerate() {
            if *a == Cx::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(n - i) {
                v[i + j] += a * b;
            }
        }
        Series(v)
    }
}

/// Taylor coefficients of x cot x.
pub(crate) fn xcotx_coeffs(len: usize) -> Vec<Cx> {
    let mut c = vec![Cx::new(0.0, 0.0); len];
    c[0] = Cx::new(1.0, 0.0);
    let mut fact = 1.0;
    let mut four = 1.0;
    for k in 1..len.div_ceil(2) {
        let kf = k as f64;
        fact *= (2.0 * kf - 1.0) * (2.0 * kf);
        four *= 4.0;
        if 2 * k < len {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            c[2 * k] = Cx::new(sign * four * BERNOULLI[k - 1] / fact, 0.0);
        }
    }
    c
}

/// Taylor coefficients of sin(πx) and cos(πx).
pub(crate) fn sincos_pi_coeffs(len: usize) -> (Vec<Cx>, Vec<Cx>) {
    let mut s = vec![Cx::new(0.0, 0.0); len];
    let mut c = vec![Cx::new(0.0, 0.0); len];
    let mut t = 1.0;
    for k in 0..len {
        if k > 0 {
            t *= PI / k as f64;
        }
        match k % 4 {
            0 => c[k] = Cx::new(t, 0.0),
            1 => s[k] = Cx::new(t, 0.0),
            2 => c[k] = Cx::new(-t, 0.0),
            _ => s[k] = Cx::new(-t, 0.0),
        }
    }
    (s, c)
}

/// Solve G(ε, v(ε)) = 0 for v as a series, given v(0) and ∂G/∂v at ε = 0.
/// Each chord step fixes one more coefficient.
pub(crate) fn solve_implicit(g: impl Fn(&Series) -> Series, v0: Cx, dgdv: Cx, len: usize) -> Series {
    let mut v = Series::constant(v0, len);
    for _ in 0..len + 1 {
        let r = g(&v);
        v = &v - &r.scale(1.0 / dgdv);
    }
    v
}
