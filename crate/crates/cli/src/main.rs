//! whf: roots, factors, supremum densities and validation reports from a
//! key=value model file.

mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::{Cfg, ConfigError, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use wh_core::distributions::{sup_density_auto, sup_density_expq, sup_density_fixed_t, InversionParams};
use wh_core::roots::{continue_complex_q, solve_real_q, StepControl};
use wh_core::validation::{consistency_report_with, mc_checks, Report, ReportOptions};
use wh_core::wh_factors::{FactorProduct, FactorSide};
use wh_core::{BetaFamilyModel, Complex64 as Cx, Error, ProcessModel};

#[derive(Parser, Debug)]
#[command(name = "whf", version, about = "Wiener-Hopf factors and supremum laws of meromorphic Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key=value model and option file
    #[arg(long, global = true)]
    model_file: Option<PathBuf>,
    /// Output file; a sidecar <out>.json holds the config. Default: stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
enum Command {
    /// Roots of q + Ψ(iζ) (keys: q, n; complex_q=true with u_max traces q + iu)
    Roots(Overrides),
    /// φ⁺ or φ⁻ on a grid (keys: q, n, side, z)
    Factor(Overrides),
    /// Density of the supremum at an exponential time (q) or a fixed time (t) (keys: x, k, tol, u_max, q0)
    Density(Overrides),
    /// Fixed-time densities over a (t, x) grid (keys: t, x, u_max, q0)
    Invert(Overrides),
    /// Consistency report (keys: q_list, z, perturb, mc, n_samples, seed, mc_q)
    Validate(Overrides),
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
struct Overrides {
    /// Settings that override the model file
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => Failure::Config(ConfigError(m)),
            e => Failure::Numeric(e),
        }
    }
}

/// What a command produced: the main text and the extra sidecar fields.
struct Output {
    body: String,
    meta: Value,
    failed: Option<String>,
}

fn json_text<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn num(x: f64) -> String {
    format!("{x:.17e}")
}

fn positive(k: &str, v: f64) -> Cfg<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError(format!("{k} must be > 0, got {v}")))
    }
}

fn side(c: &RunConfig) -> Cfg<FactorSide> {
    match c.str("side").unwrap_or("plus") {
        "plus" => Ok(FactorSide::Plus),
        "minus" => Ok(FactorSide::Minus),
        s => Err(ConfigError(format!("side: '{s}' is not plus or minus"))),
    }
}

fn cmd_roots(c: &RunConfig, fmt: Format) -> Result<Output, Failure> {
    let m = c.model()?;
    let q = c.f64_or("q", 1.0)?;
    let n = c.usize_or("n", 100)?;
    let grid = solve_real_q(&m, q, n)?;
    if c.bool("complex_q")? {
        let u_max = positive("u_max", c.f64_or("u_max", 200.0)?)?;
        let path = continue_complex_q(&m, &grid, u_max, &StepControl::default())?;
        let body = if fmt == Format::Json { json_text(&path) } else { path.to_csv() };
        let worst = path.max_residual.iter().copied().fold(0.0, f64::max);
        return Ok(Output { body, meta: json!({ "max_residual": worst, "points": path.u_grid.len() }), failed: None });
    }
    let body = if fmt == Format::Json { json_text(&grid) } else { grid.to_csv() };
    let worst = grid.residuals.iter().copied().fold(0.0, f64::max);
    Ok(Output { body, meta: json!({ "rows": 2 * n + 2, "max_residual": worst }), failed: None })
}

fn cmd_factor(c: &RunConfig, fmt: Format) -> Result<Output, Failure> {
    let m = c.model()?;
    let q = c.f64_or("q", 1.0)?;
    let grid = solve_real_q(&m, q, c.usize_or("n", 100)?)?;
    let zs = c.complex_grid("z")?.unwrap_or_else(|| (0..=20).map(|i| Cx::new(-5.0 + 0.5 * i as f64, 0.0)).collect());
    let f = FactorProduct::new(&grid, side(c)?);
    let vals = zs.iter().map(|z| f.phi_with_error(*z)).collect::<wh_core::Result<Vec<_>>>()?;
    let body = if fmt == Format::Json {
        json_text(&zs.iter().zip(&vals).map(|(z, v)| json!({ "z": z, "phi": v.value, "error": v.error })).collect::<Vec<_>>())
    } else {
        let mut s = String::from("z_re,z_im,phi_re,phi_im,error_estimate\n");
        for (z, v) in zs.iter().zip(&vals) {
            s.push_str(&format!("{},{},{},{},{}\n", num(z.re), num(z.im), num(v.value.re), num(v.value.im), num(v.error)));
        }
        s
    };
    Ok(Output { body, meta: json!({ "side": f.side, "tail_mode": f.mode }), failed: None })
}

fn inversion_params(c: &RunConfig) -> Cfg<InversionParams> {
    let d = InversionParams::default();
    Ok(InversionParams { u_max: positive("u_max", c.f64_or("u_max", d.u_max)?)?, ..d })
}

fn fixed_t_csv(rows: &[wh_core::distributions::FixedTDensity]) -> String {
    let mut s = String::from("t,x,density,error_estimate,odd_residual\n");
    for r in rows {
        for k in 0..r.x.len() {
            s.push_str(&format!("{},{},{},{},{}\n", num(r.t), num(r.x[k]), num(r.density[k]), num(r.error[k]), num(r.odd_residual[k])));
        }
    }
    s
}

fn x_grid(c: &RunConfig) -> Cfg<Vec<f64>> {
    let xs = c.grid("x")?.unwrap_or_else(|| config::parse_grid("x", "0.01:10:200:log").expect("default grid"));
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(ConfigError("x: all points must be > 0".into()));
    }
    Ok(xs)
}

fn cmd_density(c: &RunConfig, fmt: Format) -> Result<Output, Failure> {
    let m = c.model()?;
    let xs = x_grid(c)?;
    match (c.f64("q")?, c.f64("t")?) {
        (Some(_), Some(_)) => Err(ConfigError("give q (exponential time) or t (fixed time), not both".into()).into()),
        (None, None) => Err(ConfigError("missing key: give q (exponential time) or t (fixed time)".into()).into()),
        (Some(q), None) => {
            let grid = solve_real_q(&m, positive("q", q)?, c.usize_or("n", 100)?)?;
            let d = match c.has("k") {
                true => sup_density_expq(&m, &grid, c.usize_or("k", 100)?)?,
                false => sup_density_auto(&m, &grid, c.f64_or("tol", 1e-7)?)?,
            };
            let body = if fmt == Format::Json {
                json_text(&json!({ "series": d, "x": xs, "density": xs.iter().map(|x| d.density(*x)).collect::<Vec<_>>(),
                                   "cdf": xs.iter().map(|x| d.cdf(*x)).collect::<Vec<_>>() }))
            } else {
                let mut s = String::from("x,density,cdf,error_estimate\n");
                for x in &xs {
                    let (p, e) = d.density_with_error(*x);
                    s.push_str(&format!("{},{},{},{}\n", num(*x), num(p), num(d.cdf(*x)), num(e)));
                }
                s
            };
            let meta = json!({ "mode": "expq", "atom": d.atom, "normalization": d.mass(), "terms": d.k + 1, "tail_mass": d.tail_mass, "tail_error": d.tail_error });
            Ok(Output { body, meta, failed: None })
        }
        (None, Some(t)) => {
            let r = sup_density_fixed_t(&m, positive("t", t)?, &xs, c.f64("q0")?, &inversion_params(c)?)?;
            let body = if fmt == Format::Json { json_text(&r) } else { fixed_t_csv(std::slice::from_ref(&r)) };
            Ok(Output { body, meta: json!({ "mode": "fixed_t", "q0": r.q0, "u_end": r.u_end, "evaluations": r.evaluations }), failed: None })
        }
    }
}

fn cmd_invert(c: &RunConfig, fmt: Format) -> Result<Output, Failure> {
    let m = c.model()?;
    let xs = x_grid(c)?;
    let ts = c.grid("t")?.ok_or_else(|| ConfigError("missing key 't' (a time or a grid lo:hi:count[:log])".into()))?;
    let p = inversion_params(c)?;
    let q0 = c.f64("q0")?;
    let rows = ts.iter().map(|t| sup_density_fixed_t(&m, positive("t", *t)?, &xs, q0, &p).map_err(Failure::from)).collect::<Result<Vec<_>, _>>()?;
    let body = if fmt == Format::Json { json_text(&rows) } else { fixed_t_csv(&rows) };
    Ok(Output { body, meta: json!({ "times": ts.len(), "points": xs.len() }), failed: None })
}

fn canonical_models() -> Vec<ProcessModel> {
    vec![
        ProcessModel::sech(0.25).expect("valid"),
        ProcessModel::sinh(0.25, 1.0, -0.1).expect("valid"),
        BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, 2.5, 0.5, 0.2).expect("valid").into(),
    ]
}

fn cmd_validate(c: &RunConfig) -> Result<Output, Failure> {
    let models = if c.has("family") { vec![c.model()?] } else { canonical_models() };
    let q_list = c.grid("q_list")?.unwrap_or_else(|| vec![0.5, 1.0, 5.0]);
    let zs = c.complex_grid("z")?.unwrap_or_else(|| (0..25).map(|i| Cx::new(-3.0 + 0.25 * i as f64, 0.0)).collect());
    let opt = ReportOptions { n: c.usize_or("n", 100)?, perturb: c.perturb()? };
    let mut reports: Vec<Report> = models.iter().map(|m| consistency_report_with(m, &q_list, &zs, &opt)).collect();
    if c.bool("mc")? {
        let n = c.usize_or("n_samples", 1_000_000)?;
        let seed = c.usize_or("seed", 42)? as u64;
        let q = positive("mc_q", c.f64_or("mc_q", 1.0)?)?;
        for r in reports.iter_mut() {
            if let ProcessModel::SechPoisson(s) = r.model {
                r.checks.extend(mc_checks(s.alpha, q, n, seed));
                r.pass = r.checks.iter().all(|c| c.pass);
            }
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let failed = (!pass).then(|| {
        let names: Vec<String> = reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.pass).map(move |c| format!("{} {}", r.model.family_name(), c.name)))
            .collect();
        format!("checks failed: {}", names.join(", "))
    });
    Ok(Output { body: json_text(&json!({ "pass": pass, "reports": reports })), meta: json!({ "pass": pass }), failed })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let mut c = RunConfig::default();
    if let Some(p) = &cli.model_file {
        let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
        RunConfig::parse_text(&text, &mut c)?;
    }
    let (Command::Roots(o) | Command::Factor(o) | Command::Density(o) | Command::Invert(o) | Command::Validate(o)) = &cli.command;
    for kv in &o.set {
        c.set(kv)?;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("threads: {e}")))?;
    }
    let mut out = match &cli.command {
        Command::Roots(_) => cmd_roots(&c, cli.format)?,
        Command::Factor(_) => cmd_factor(&c, cli.format)?,
        Command::Density(_) => cmd_density(&c, cli.format)?,
        Command::Invert(_) => cmd_invert(&c, cli.format)?,
        Command::Validate(_) => cmd_validate(&c)?,
    };
    let name = format!("{:?}", cli.command).split('(').next().unwrap_or("").to_lowercase();
    let model = if c.has("family") { Some(c.model()?) } else { None };
    out.meta = json!({ "command": name, "config": c.values, "model": model, "format": format!("{:?}", cli.format).to_lowercase(), "result": out.meta });
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => {
                    let side = p.with_extension(match p.extension() {
                        Some(e) => format!("{}.json", e.to_string_lossy()),
                        None => "json".into(),
                    });
                    std::fs::write(p, &out.body).and_then(|_| std::fs::write(&side, json_text(&out.meta)))
                }
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("whf: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match out.failed {
                Some(msg) => {
                    eprintln!("whf: validation failed: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Config(e)) => {
            eprintln!("whf: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("whf: numerical failure: {e}");
            ExitCode::from(3)
        }
    }
}
