//! `verify`, `solve` and `table`, with their output files and exit codes.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use burkholder::grid::{GridField, GridSpec};
use burkholder::inequality::{
    check_expint_radial, check_llogl, check_loginv, check_lp_mean, check_main_inequality, Source,
};
use burkholder::radial::{
    build_packing, ClassTarget, PackingSpec, PiecewiseRadialMap, RadialCoefficient, RadialProfile,
};
use burkholder::report::{write_csv, QuadratureReport};
use burkholder::solver::{area_integral, solve_principal, BeltramiCoefficient, BumpMap, PrincipalSolution};
use clap::ValueEnum;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Format, MuSpec, RunConfig};
use crate::suites::{self, power_map, Suite, SuiteOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Exit code of an error: solver non-convergence is 3, anything else 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<burkholder::Error>() {
        Some(burkholder::Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

#[derive(Serialize)]
struct Document<'a> {
    suite: &'static str,
    config: &'a RunConfig,
    reports: &'a [QuadratureReport],
    extras: &'a std::collections::BTreeMap<String, serde_json::Value>,
}

/// Serialized report of a suite run, the bytes written by `verify`.
pub fn render(suite: Suite, cfg: &RunConfig, out: &SuiteOutput) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match cfg.format {
        Format::Json => {
            let doc = Document {
                suite: suite.name(),
                config: cfg,
                reports: &out.reports,
                extras: &out.extras,
            };
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
        Format::Csv => write_csv(&out.reports, &mut buf)?,
    }
    Ok(buf)
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

fn emit(bytes: &[u8], out: Option<&Path>, name: &str) -> Result<Option<PathBuf>> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            Ok(Some(path))
        }
        None => {
            io::stdout().write_all(bytes)?;
            Ok(None)
        }
    }
}

fn summary_line(r: &QuadratureReport) -> String {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "{:<12} {:<36} {:<40} value={:.6e} bound={:.6e} est={:.2e}",
        r.verdict.as_str(),
        r.check,
        params.join(" "),
        r.value,
        r.bound,
        r.est_error
    )
}

pub fn verify(suite: Suite, cfg: &RunConfig) -> Result<i32> {
    let out = suites::run(suite, cfg)?;
    let bytes = render(suite, cfg, &out)?;
    let name = format!("{}.{}", suite.name(), extension(cfg.format));
    let path = emit(&bytes, cfg.out.as_deref(), &name)?;
    let mut err = io::stderr().lock();
    for r in &out.reports {
        writeln!(err, "{}", summary_line(r))?;
    }
    let failed = out.failures().count();
    writeln!(err, "{}: {} rows, {} failed", suite.name(), out.reports.len(), failed)?;
    if let Some(p) = path {
        writeln!(err, "wrote {}", p.display())?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

// ---------------------------------------------------------------- solve

/// Coefficient of a `--mu` spec on `spec`; random kinds draw from `seed`.
pub fn coefficient(mu: &MuSpec, spec: GridSpec, seed: u64) -> Result<BeltramiCoefficient> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match *mu {
        MuSpec::Zero => BeltramiCoefficient::zero(spec),
        MuSpec::Const { k } => BeltramiCoefficient::constant_disk(spec, k)?,
        MuSpec::Radial { k } => BeltramiCoefficient::radial(spec, &RadialCoefficient::constant(k)?)?,
        MuSpec::Random { k } => BeltramiCoefficient::random_smooth(spec, &mut rng, k)?,
        MuSpec::Bump { k } => BumpMap::random(&mut rng, spec, k)?.coefficient(spec)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub mu: String,
    pub k: f64,
    pub iterations: usize,
    pub residual: f64,
    pub b1: [f64; 2],
    pub area: f64,
}

pub fn summarize(mu: &MuSpec, sol: &PrincipalSolution) -> SolveSummary {
    SolveSummary {
        mu: mu.to_string(),
        k: sol.mu.k(),
        iterations: sol.iterations,
        residual: sol.residual,
        b1: [sol.b[0].re, sol.b[0].im],
        area: area_integral(sol),
    }
}

/// `|Df| = |f_z| + |f_z̄|` and `J = |f_z|² − |f_z̄|²` as real fields.
pub fn derived_fields(sol: &PrincipalSolution) -> (GridField, GridField) {
    let spec = sol.spec();
    let (mut norm, mut jac) = (GridField::zeros(spec), GridField::zeros(spec));
    for i in 0..spec.len() {
        let d = sol.deriv_at(i);
        norm.values_mut()[i] = Complex64::new(d.opnorm(), 0.0);
        jac.values_mut()[i] = Complex64::new(d.jac(), 0.0);
    }
    (norm, jac)
}

pub fn solve(cfg: &RunConfig) -> Result<i32> {
    let Some(mu) = &cfg.mu else {
        bail!("solve needs --mu KIND[:k=...]");
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let coeff = coefficient(mu, cfg.spec(), cfg.seed)?;
    let sol = match solve_principal(&coeff, cfg.tol) {
        Ok(s) => s,
        Err(e) => {
            if let burkholder::Error::NonConvergence { history, .. } = &e {
                eprintln!("residual history: {}", serde_json::to_string(history)?);
            }
            return Err(e.into());
        }
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let (norm, jac) = derived_fields(&sol);
    for (name, field) in [
        ("omega", &sol.omega),
        ("s_omega", &sol.s_omega),
        ("df", &norm),
        ("jacobian", &jac),
    ] {
        let path = dir.join(format!("{name}.qcgf"));
        field
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = summarize(mu, &sol);
    let path = dir.join("summary.json");
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!(
        "mu={} k={} iterations={} residual={:.3e} b1={:.6}{:+.6}i area={:.6}",
        summary.mu, summary.k, summary.iterations, summary.residual, summary.b1[0], summary.b1[1], summary.area
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- table

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Corollary {
    LpMean,
    Llogl,
    Expint,
    Loginv,
    Main,
}

/// One plotted point; `error` is set instead of the values when the
/// parameter is outside the corollary's range.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub parameter: f64,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub verdict: Option<&'static str>,
    pub error: Option<String>,
}

impl TableRow {
    fn from_result(parameter: f64, r: burkholder::Result<QuadratureReport>) -> Self {
        match r {
            Ok(r) => TableRow {
                parameter,
                value: Some(r.value),
                bound: Some(r.bound),
                slack: Some(r.slack),
                verdict: Some(r.verdict.as_str()),
                error: None,
            },
            Err(e) => TableRow {
                parameter,
                value: None,
                bound: None,
                slack: None,
                verdict: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Core radius of the `main` sweep map. With a linear core the power map
/// stays extremal up to and including the top exponent `2K/(K−1)`.
pub const MAIN_CORE: f64 = 0.5;

/// Default sweep of each corollary's parameter.
pub fn default_values(c: Corollary, kd: f64) -> Vec<f64> {
    match c {
        Corollary::LpMean => vec![2.0, 2.5, 3.0, 3.5],
        Corollary::Main => {
            let top = if kd > 1.0 { 2.0 * kd / (kd - 1.0) } else { 6.0 };
            (0..=8).map(|i| 2.0 + (top - 2.0) * i as f64 / 8.0).collect()
        }
        Corollary::Expint => vec![0.0, 0.25, 0.5, 0.75],
        Corollary::Loginv => vec![1.5, 2.0, 3.0, 4.0],
        Corollary::Llogl => vec![1.0, 1.5, 2.0, 3.0],
    }
}

fn load_packing(path: &Path) -> Result<PiecewiseRadialMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = PackingSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(build_packing(&spec, ClassTarget::Any)?)
}

/// Rows of a corollary sweep. The parameter is `p` for `lp-mean` and
/// `main`, the constant `α` for `expint` and `K` for `llogl` and `loginv`.
/// Fixed-`K` sweeps use `--K` (default 2) on the power map, or the map of
/// `--packing` when given.
pub fn table_rows(c: Corollary, values: &[f64], cfg: &RunConfig) -> Result<Vec<TableRow>> {
    let kd = cfg.k.unwrap_or(2.0);
    let fixed = match &cfg.packing {
        Some(p) => Some(load_packing(p)?),
        None => None,
    };
    let map_k = |k: f64| power_map(k, 0.0);
    let rows = values
        .iter()
        .map(|&v| {
            let r = match c {
                Corollary::LpMean => match &fixed {
                    Some(m) => check_lp_mean(Source::Radial(m), kd, v),
                    None => map_k(kd).and_then(|m| check_lp_mean(Source::Radial(&m), kd, v)),
                },
                Corollary::Main => match &fixed {
                    Some(m) => check_main_inequality(Source::Radial(m), v),
                    None => power_map(kd, MAIN_CORE).and_then(|m| check_main_inequality(Source::Radial(&m), v)),
                },
                Corollary::Llogl => map_k(v).and_then(|m| check_llogl(Source::Radial(&m))),
                Corollary::Expint => RadialCoefficient::constant(v).and_then(|a| check_expint_radial(&a)),
                Corollary::Loginv => RadialProfile::power_exponent(v, 0.0, 1.0)
                    .and_then(|p| check_loginv(&p))
                    .map(|r| r.report),
            };
            TableRow::from_result(v, r)
        })
        .collect();
    Ok(rows)
}

pub fn write_table<W: Write>(rows: &[TableRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn table(c: Corollary, values: Option<Vec<f64>>, cfg: &RunConfig) -> Result<i32> {
    let values = values.unwrap_or_else(|| default_values(c, cfg.k.unwrap_or(2.0)));
    let rows = table_rows(c, &values, cfg)?;
    let mut buf = Vec::new();
    write_table(&rows, &mut buf)?;
    let name = format!("{}.csv", c.to_possible_value().expect("named variant").get_name());
    if let Some(p) = emit(&buf, cfg.out.as_deref(), &name)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(EXIT_OK)
}
