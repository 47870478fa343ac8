//! Exact simulation of the sech compound Poisson process and its running
//! maximum.

use crate::error::{Error, Result};
use crate::models::SechPoissonModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

const TABLE_CELLS: usize = 100_000;
const BLOCK: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Horizon {
    /// Independent exponential time with rate q.
    ExpQ(f64),
    /// Fixed time t.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    /// Sorted.
    pub samples: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl EmpiricalCdf {
    /// Fraction of samples ≤ x.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|s| *s <= x) as f64 / self.n as f64
    }

    /// Fraction of paths whose maximum is exactly 0.
    pub fn atom(&self) -> f64 {
        self.samples.partition_point(|s| *s <= 0.0) as f64 / self.n as f64
    }

    /// Smallest sample with at least a fraction p of the samples at or below it.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p * self.n as f64).ceil() as usize).clamp(1, self.n);
        self.samples[k - 1]
    }

    /// √(p(1−p)/n).
    pub fn binomial_se(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// Scale of the Kolmogorov statistic: the largest pointwise standard
    /// error, 1/(2√n).
    pub fn kolmogorov_se(&self) -> f64 {
        0.5 / (self.n as f64).sqrt()
    }

    /// Two-sample Kolmogorov distance.
    pub fn distance(&self, other: &EmpiricalCdf) -> f64 {
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        let (a, b) = (&self.samples, &other.samples);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("sample\n");
        for v in &self.samples {
            s.push_str(&format!("{v:.17e}\n"));
        }
        s
    }
}

/// Inverse CDF of the normalized jump law e^{αx}/(Λ cosh x).
pub(crate) struct JumpTable {
    alpha: f64,
    x: Vec<f64>,
    cdf: Vec<f64>,
    /// ∫ of the unnormalized density over the table.
    pub(crate) total: f64,
}

fn gl5() -> ([f64; 5], [f64; 5]) {
    let a = (5.0f64 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0f64 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    ([-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb])
}

impl JumpTable {
    pub(crate) fn new(alpha: f64) -> JumpTable {
        // ends where the neglected mass is below 1e-16
        let right = (40.0f64).max((37.0 + (2.0 / (1.0 - alpha)).ln()) / (1.0 - alpha));
        let left = (40.0f64).max((37.0 + (2.0 / (1.0 + alpha)).ln()) / (1.0 + alpha));
        let h = (left + right) / TABLE_CELLS as f64;
        let x: Vec<f64> = (0..=TABLE_CELLS).map(|i| -left + h * i as f64).collect();
        let (gx, gw) = gl5();
        let cells: Vec<f64> = x
            .windows(2)
            .map(|w| {
                let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                gx.iter().zip(&gw).map(|(s, wt)| wt * density(alpha, c + r * s)).sum::<f64>() * r
            })
            .collect();
        let mut cdf = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for c in &cells {
            acc += c;
            cdf.push(acc);
        }
        let total = acc;
        cdf.iter_mut().for_each(|v| *v /= total);
        JumpTable { alpha, x, cdf, total }
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        let (gx, gw) = gl5();
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter().zip(&gw).map(|(s, wt)| wt * density(self.alpha, c + r * s)).sum::<f64>() * r / self.total
    }

    /// The jump with CDF value u, by Newton inside the bracketing cell.
    pub(crate) fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|c| *c <= u).clamp(1, self.x.len() - 1) - 1;
        let (a, b) = (self.x[i], self.x[i + 1]);
        let target = u - self.cdf[i];
        let mut x = a + (b - a) * (target / (self.cdf[i + 1] - self.cdf[i])).clamp(0.0, 1.0);
        for _ in 0..4 {
            let f = density(self.alpha, x) / self.total;
            let step = (self.partial(a, x) - target) / f;
            x = (x - step).clamp(a, b);
            if step.abs() < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }
}

fn density(alpha: f64, x: f64) -> f64 {
    // e^{αx}/cosh x = 2 e^{(α−1)|x|... } written to avoid overflow
    let ax = x.abs();
    2.0 * (alpha * x - ax).exp() / (1.0 + (-2.0 * ax).exp())
}

/// Running maximum of X over `horizon`, for n_samples independent paths.
/// Blocks of paths draw from their own ChaCha20 streams, so the result
/// depends on the seed only, not on the thread count.
pub fn mc_sup_sech(alpha: f64, horizon: Horizon, n_samples: usize, seed: u64) -> Result<EmpiricalCdf> {
    let m = SechPoissonModel::new(alpha)?;
    match horizon {
        Horizon::ExpQ(q) if !(q > 0.0 && q.is_finite()) => return Err(Error::Domain(format!("need q > 0, got {q}"))),
        Horizon::Fixed(t) if !(t >= 0.0 && t.is_finite()) => return Err(Error::Domain(format!("need t ≥ 0, got {t}"))),
        _ => {}
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    let rate = m.jump_rate();
    let table = JumpTable::new(alpha);
    let blocks = n_samples.div_ceil(BLOCK);
    let per: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(n_samples - b * BLOCK);
            (0..len)
                .map(|_| {
                    let (mut x, mut top) = (0.0f64, 0.0f64);
                    match horizon {
                        Horizon::ExpQ(q) => {
                            let p_jump = rate / (rate + q);
                            while rng.random::<f64>() < p_jump {
                                x += table.sample(rng.random::<f64>());
                                top = top.max(x);
                            }
                        }
                        Horizon::Fixed(t) => {
                            let mut clock = 0.0;
                            loop {
                                clock += -(1.0 - rng.random::<f64>()).ln() / rate;
                                if clock > t {
                                    break;
                                }
                                x += table.sample(rng.random::<f64>());
                                top = top.max(x);
                            }
                        }
                    }
                    top
                })
                .collect()
        })
        .collect();
    let mut samples: Vec<f64> = per.into_iter().flatten().collect();
    samples.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { samples, n: n_samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_normalizes_to_jump_rate() {
        for a in [-0.5, 0.0, 0.25, 0.8] {
            let t = JumpTable::new(a);
            let rate = SechPoissonModel::new(a).unwrap().jump_rate();
            assert!((t.total - rate).abs() < 1e-10 * rate, "a={a}: {} vs {rate}", t.total);
            for u in [1e-9, 0.1, 0.5, 0.77, 1.0 - 1e-9] {
                let x = t.sample(u);
                let i = t.x.partition_point(|v| *v <= x) - 1;
                let back = t.cdf[i] + t.partial(t.x[i], x);
                assert!((back - u).abs() < 1e-12, "a={a} u={u}: {back}");
            }
        }
        // α = 0 is symmetric
        let t = JumpTable::new(0.0);
        assert!(t.sample(0.5).abs() < 1e-12);
    }

    #[test]
    fn reproducible_and_sorted() {
        let a = mc_sup_sech(0.25, Horizon::ExpQ(1.0), 1, 7).unwrap();
        let b = mc_sup_sech(0.25, Horizon::ExpQ(1.0), 1, 7).unwrap();
        assert_eq!(a, b);
        let c = mc_sup_sech(0.0, Horizon::Fixed(2.0), 50_000, 3).unwrap();
        assert!(c.samples.windows(2).all(|w| w[0] <= w[1]));
        assert!(c.samples[0] >= 0.0);
        assert_eq!(c, mc_sup_sech(0.0, Horizon::Fixed(2.0), 50_000, 3).unwrap());
        assert!(mc_sup_sech(1.2, Horizon::ExpQ(1.0), 10, 0).is_err());
    }

    #[test]
    fn seeds_agree_in_distribution() {
        let n = 40_000;
        let a = mc_sup_sech(0.0, Horizon::ExpQ(1.0), n, 1).unwrap();
        let b = mc_sup_sech(0.0, Horizon::ExpQ(1.0), n, 2).unwrap();
        // two-sample Kolmogorov bound at level 1e-3: 1.95 √(2/n)
        assert!(a.distance(&b) < 1.95 * (2.0 / n as f64).sqrt());
        assert!(a.distance(&a) == 0.0);
    }
}
