//! Flat key=value configuration: a file, then command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use wh_core::roots::RootId;
use wh_core::{BetaFamilyModel, Complex64 as Cx, ProcessModel};

const MODEL_KEYS: [&str; 12] =
    ["family", "alpha", "sigma", "mu", "c1", "c2", "alpha1", "alpha2", "beta1", "beta2", "lambda1", "lambda2"];
const OPTION_KEYS: [&str; 17] = [
    "q_list", "q", "t", "n", "k", "x", "z", "u_max", "q0", "seed", "n_samples", "side", "complex_q", "tol", "perturb", "mc", "mc_q",
];

/// A usage or configuration problem; exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Cfg<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Cfg<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Lines of key=value; blank lines and lines starting with # are skipped.
    pub fn parse_text(text: &str, into: &mut RunConfig) -> Cfg<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            into.set(line).map_err(|e| ConfigError(format!("line {}: {}", i + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, kv: &str) -> Cfg<()> {
        let Some((k, v)) = kv.split_once('=') else {
            return err(format!("expected key=value, got '{kv}'"));
        };
        let (k, v) = (k.trim(), v.trim());
        if !MODEL_KEYS.contains(&k) && !OPTION_KEYS.contains(&k) {
            return err(format!("unknown key '{k}'"));
        }
        self.values.insert(k.to_string(), v.to_string());
        Ok(())
    }

    pub fn has(&self, k: &str) -> bool {
        self.values.contains_key(k)
    }

    pub fn f64(&self, k: &str) -> Cfg<Option<f64>> {
        self.values
            .get(k)
            .map(|v| v.parse::<f64>().map_err(|_| ConfigError(format!("{k}: '{v}' is not a number"))))
            .transpose()
    }

    pub fn f64_or(&self, k: &str, d: f64) -> Cfg<f64> {
        Ok(self.f64(k)?.unwrap_or(d))
    }

    pub fn usize_or(&self, k: &str, d: usize) -> Cfg<usize> {
        match self.values.get(k) {
            None => Ok(d),
            Some(v) => {
                // accept 1e6 style counts
                let x: f64 = v.parse().map_err(|_| ConfigError(format!("{k}: '{v}' is not a count")))?;
                if x < 0.0 || x.fract() != 0.0 || x > 1e15 {
                    return err(format!("{k}: '{v}' is not a non-negative integer"));
                }
                Ok(x as usize)
            }
        }
    }

    pub fn bool(&self, k: &str) -> Cfg<bool> {
        match self.values.get(k).map(|s| s.as_str()) {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some(v) => err(format!("{k}: '{v}' is not true/false")),
        }
    }

    pub fn str(&self, k: &str) -> Option<&str> {
        self.values.get(k).map(|s| s.as_str())
    }

    /// The model, checked against its invariants. Keys of other families
    /// are rejected.
    pub fn model(&self) -> Cfg<ProcessModel> {
        let Some(family) = self.str("family") else {
            return err("missing key 'family' (sech, sinh or beta)");
        };
        let allowed: &[&str] = match family {
            "sech" => &["alpha"],
            "sinh" => &["alpha", "sigma", "mu"],
            "beta" => &["c1", "c2", "alpha1", "alpha2", "beta1", "beta2", "lambda1", "lambda2", "sigma", "mu"],
            f => return err(format!("unknown family '{f}' (sech, sinh or beta)")),
        };
        for k in MODEL_KEYS.iter().filter(|k| **k != "family") {
            if self.has(k) && !allowed.contains(k) {
                return err(format!("key '{k}' does not belong to the {family} family"));
            }
        }
        let need = |k: &str| -> Cfg<f64> { self.f64(k)?.ok_or_else(|| ConfigError(format!("missing key '{k}' for the {family} family"))) };
        let m = match family {
            "sech" => ProcessModel::sech(need("alpha")?),
            "sinh" => ProcessModel::sinh(need("alpha")?, need("sigma")?, need("mu")?),
            _ => BetaFamilyModel::new(
                need("c1")?,
                need("c2")?,
                need("alpha1")?,
                need("alpha2")?,
                need("beta1")?,
                need("beta2")?,
                need("lambda1")?,
                need("lambda2")?,
                need("sigma")?,
                need("mu")?,
            )
            .map(Into::into),
        };
        m.map_err(|e| ConfigError(format!("invalid model: {e}")))
    }

    /// x-type grid: "lo:hi:count[:log]" or a comma list.
    pub fn grid(&self, k: &str) -> Cfg<Option<Vec<f64>>> {
        self.values.get(k).map(|v| parse_grid(k, v)).transpose()
    }

    /// Complex points: a real grid spec, or a comma list of a, bi, a+bi.
    pub fn complex_grid(&self, k: &str) -> Cfg<Option<Vec<Cx>>> {
        let Some(v) = self.values.get(k) else { return Ok(None) };
        if v.contains(':') {
            return Ok(Some(parse_grid(k, v)?.into_iter().map(|x| Cx::new(x, 0.0)).collect()));
        }
        v.split(',').map(|s| parse_complex(s.trim()).ok_or_else(|| ConfigError(format!("{k}: '{s}' is not a complex number")))).collect::<Cfg<_>>().map(Some)
    }

    /// "id:by" with id one of n, -n, 0+, 0-.
    pub fn perturb(&self) -> Cfg<Option<(RootId, f64)>> {
        let Some(v) = self.str("perturb") else { return Ok(None) };
        let bad = || ConfigError(format!("perturb: '{v}' is not id:shift (id = n, -n, 0+ or 0-)"));
        let (id, by) = v.split_once(':').ok_or_else(bad)?;
        let by: f64 = by.parse().map_err(|_| bad())?;
        let id = match id {
            "0+" => RootId::ZeroPlus,
            "0-" => RootId::ZeroMinus,
            s if s.starts_with('-') => RootId::Neg(s[1..].parse().map_err(|_| bad())?),
            s => RootId::Pos(s.parse().map_err(|_| bad())?),
        };
        if matches!(id, RootId::Neg(0) | RootId::Pos(0)) {
            return Err(bad());
        }
        Ok(Some((id, by)))
    }
}

pub fn parse_grid(k: &str, v: &str) -> Cfg<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| ConfigError(format!("{k}: '{s}' is not a number")));
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return err(format!("{k}: grid '{v}' is not lo:hi:count[:log]"));
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| ConfigError(format!("{k}: '{}' is not a count", parts[2])))?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(s) => return err(format!("{k}: spacing '{s}' is not lin or log")),
        };
        if count == 0 || !(lo <= hi) || (log && !(lo > 0.0)) {
            return err(format!("{k}: grid '{v}' needs count ≥ 1, lo ≤ hi and lo > 0 for log spacing"));
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        let f = |i: usize| i as f64 / (count - 1) as f64;
        Ok((0..count)
            .map(|i| if log { (lo.ln() + (hi.ln() - lo.ln()) * f(i)).exp() } else { lo + (hi - lo) * f(i) })
            .collect())
    } else {
        v.split(',').map(num).collect()
    }
}

pub fn parse_complex(s: &str) -> Option<Cx> {
    let s = s.replace(' ', "");
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not a leading sign or an exponent sign
        let b = body.as_bytes();
        let cut = (1..b.len()).rev().find(|&j| (b[j] == b'+' || b[j] == b'-') && !matches!(b[j - 1], b'e' | b'E'));
        let (re, im) = match cut {
            Some(j) => (body[..j].parse().ok()?, &body[j..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            v => v.parse().ok()?,
        };
        Some(Cx::new(re, im))
    } else {
        Some(Cx::new(s.parse().ok()?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_and_grids() {
        assert_eq!(parse_complex("1.5-2i"), Some(Cx::new(1.5, -2.0)));
        assert_eq!(parse_complex("-i"), Some(Cx::new(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3+1e2i"), Some(Cx::new(1e-3, 100.0)));
        assert_eq!(parse_complex("-3"), Some(Cx::new(-3.0, 0.0)));
        assert_eq!(parse_complex("x"), None);
        let g = parse_grid("x", "0.01:10:200:log").unwrap();
        assert_eq!(g.len(), 200);
        assert!((g[199] - 10.0).abs() < 1e-12);
        assert_eq!(parse_grid("x", "1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_grid("x", "0:1:5:log").is_err());
    }

    #[test]
    fn rejects_unknown_and_foreign_keys() {
        let mut c = RunConfig::default();
        assert!(c.set("colour=blue").is_err());
        RunConfig::parse_text("# sech\nfamily = sech\nalpha=0.25\n", &mut c).unwrap();
        assert!(c.model().is_ok());
        c.set("sigma=1").unwrap();
        assert!(c.model().unwrap_err().0.contains("does not belong"));
        let mut c = RunConfig::default();
        RunConfig::parse_text("family=sech\nalpha=1.5", &mut c).unwrap();
        assert!(c.model().unwrap_err().0.contains("|alpha| < 1"));
    }
}
