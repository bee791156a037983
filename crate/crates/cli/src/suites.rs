//! Verification batteries run by `verify`. Every check becomes one
//! [`QuadratureReport`] row; demonstrations add structured extras.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use anyhow::Result;
use burkholder::functional::{burkholder_p, inverse_functional, rank_one_probe, Functional, MatrixN, PlanarDeriv};
use burkholder::grid::GridSpec;
use burkholder::inequality::{
    check_burkholder_energy, check_expint_grid, check_expint_radial, check_llogl, check_loginv, check_lp_mean,
    check_main_inequality, spread, GridSource, Source,
};
use burkholder::interpolation::{
    check_beltrami_interpolation, check_interpolation_bound, counterexample_demo, default_counterexample_g,
    interpolation_bound, mobius, p_interp, support_line, AnalyticFamily, Form, LambdaSampling, SupportLineDiag,
};
use burkholder::radial::{
    build_packing, radial_deriv, random_packing, rho_from_alpha, ClassTarget, Domain, NodeSpec, PackingSpec,
    PiecewiseRadialMap, RadialCoefficient, RadialProfile,
};
use burkholder::report::{QuadratureReport, Verdict};
use burkholder::solver::{area_integral, solve_with, BeltramiCoefficient, BumpMap, PrincipalSolution};
use burkholder::spectral::Spectral;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Family, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Radial,
    Solver,
    Inequalities,
    Interpolation,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [
        Suite::Core,
        Suite::Radial,
        Suite::Solver,
        Suite::Inequalities,
        Suite::Interpolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Radial => "radial",
            Suite::Solver => "solver",
            Suite::Inequalities => "inequalities",
            Suite::Interpolation => "interpolation",
            Suite::All => "all",
        }
    }

    /// Independent random stream per suite, so a suite run alone reproduces
    /// its rows inside `all`.
    fn stream(self) -> u64 {
        match self {
            Suite::Core => 1,
            Suite::Radial => 2,
            Suite::Solver => 3,
            Suite::Inequalities => 4,
            Suite::Interpolation => 5,
            Suite::All => 0,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteOutput {
    pub reports: Vec<QuadratureReport>,
    pub extras: BTreeMap<String, serde_json::Value>,
}

impl SuiteOutput {
    fn push(&mut self, r: QuadratureReport) {
        self.reports.push(r);
    }

    fn extend(&mut self, other: SuiteOutput) {
        self.reports.extend(other.reports);
        self.extras.extend(other.extras);
    }

    pub fn failures(&self) -> impl Iterator<Item = &QuadratureReport> {
        self.reports.iter().filter(|r| !r.verdict.ok())
    }
}

pub fn run(suite: Suite, cfg: &RunConfig) -> Result<SuiteOutput> {
    match suite {
        Suite::All => {
            let mut out = SuiteOutput::default();
            for s in Suite::PARTS {
                out.extend(run(s, cfg)?);
            }
            Ok(out)
        }
        s => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(s.stream());
            match s {
                Suite::Core => core_suite(&mut rng),
                Suite::Radial => radial_suite(cfg, &mut rng),
                Suite::Solver => solver_suite(cfg, &mut rng),
                Suite::Inequalities => inequalities_suite(cfg, &mut rng),
                Suite::Interpolation => interpolation_suite(cfg, &mut rng),
                Suite::All => unreachable!(),
            }
        }
    }
}

fn with_param(mut r: QuadratureReport, key: &str, v: f64) -> QuadratureReport {
    r.params.insert(key.to_string(), v);
    r
}

fn grid_label(spec: GridSpec) -> String {
    format!("grid N={} L={}", spec.n(), spec.half_side())
}

/// Coefficient builder with a fixed seed, reproducible on every grid.
fn seeded<F>(seed: u64, f: F) -> impl Fn(GridSpec) -> burkholder::Result<BeltramiCoefficient>
where
    F: Fn(GridSpec, &mut ChaCha8Rng) -> burkholder::Result<BeltramiCoefficient>,
{
    move |s| f(s, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn power_map(k: f64, r: f64) -> burkholder::Result<PiecewiseRadialMap> {
    let spec = PackingSpec {
        domain: Domain::unit_disk(),
        nodes: vec![NodeSpec::power(Complex64::new(0.0, 0.0), 1.0, r, k)],
    };
    build_packing(&spec, ClassTarget::Any)
}

// ---------------------------------------------------------------- core

pub const NORMALIZATION_EXPONENTS: [f64; 7] = [-2.0, 0.0, 1.0, 2.0, 3.0, 4.0, 10.0];
pub const PROBES: usize = 10_000;
pub const SECOND_DIFF_TOL: f64 = 1e-8;
pub const DUALITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
enum Shape {
    Concave,
    Affine,
    Convex,
}

/// Rank-one shape of `B_p`: affine at `p ∈ {0, 2}`, convex in between,
/// concave outside.
const TRICHOTOMY: [(f64, Shape); 10] = [
    (-2.0, Shape::Concave),
    (-0.5, Shape::Concave),
    (0.0, Shape::Affine),
    (0.3, Shape::Convex),
    (1.0, Shape::Convex),
    (1.5, Shape::Convex),
    (2.0, Shape::Affine),
    (2.5, Shape::Concave),
    (4.0, Shape::Concave),
    (10.0, Shape::Concave),
];

fn random_deriv(rng: &mut ChaCha8Rng) -> PlanarDeriv {
    let mut c = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    PlanarDeriv::new(c(), c())
}

fn random_positive(rng: &mut ChaCha8Rng) -> MatrixN {
    loop {
        let d = random_deriv(rng);
        if d.jac() > 0.05 {
            return d.to_matrix();
        }
    }
}

/// `|a| + |q−1||b|` times the power factor of `B_q`: the size of the terms
/// whose difference is `B_q`, against which rounding is measured.
fn burkholder_scale(d: &PlanarDeriv, q: f64) -> f64 {
    let (a, b) = (d.dz.norm(), d.dzbar.norm());
    let base = if q >= 1.0 { a + b } else { a - b };
    (a + (q - 1.0).abs() * b) * base.powf(q - 1.0)
}

fn core_suite(rng: &mut ChaCha8Rng) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let id = PlanarDeriv::identity();
    for p in NORMALIZATION_EXPONENTS {
        out.push(QuadratureReport::new(
            "normalization",
            &[("p", p)],
            burkholder_p(&id, p)?,
            1.0,
            0.0,
            "exact",
        ));
    }

    let per = PROBES / TRICHOTOMY.len();
    for (p, shape) in TRICHOTOMY {
        let f = Functional::Burkholder(p);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..per {
            let a = random_positive(rng);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = MatrixN::outer(&[th.cos(), th.sin()], &[ph.cos(), ph.sin()])?;
            let r = rank_one_probe(&f, &a, &x, 0.5, 5)?;
            let v = match shape {
                Shape::Concave => r.max_relative(),
                Shape::Convex => -r.min_relative(),
                Shape::Affine => r.max_relative().max(-r.min_relative()),
            };
            worst = worst.max(v);
        }
        let sign = match shape {
            Shape::Concave => -1.0,
            Shape::Affine => 0.0,
            Shape::Convex => 1.0,
        };
        out.push(QuadratureReport::new(
            "trichotomy",
            &[("p", p), ("probes", per as f64), ("sign", sign)],
            worst,
            SECOND_DIFF_TOL,
            0.0,
            "rank-one lines, 5 second differences",
        ));
    }

    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < PROBES {
        let d = random_deriv(rng);
        if d.jac() <= 1e-2 {
            continue;
        }
        let p = rng.gen_range(-3.0..5.0);
        let lhs = inverse_functional(&Functional::Burkholder(p), &d.to_matrix())?;
        let rhs = burkholder_p(&d, 2.0 - p)?;
        worst = worst.max((lhs - rhs).abs() / burkholder_scale(&d, 2.0 - p));
        n += 1;
    }
    out.push(QuadratureReport::new(
        "hat_duality",
        &[("probes", PROBES as f64)],
        worst,
        DUALITY_TOL,
        0.0,
        "random J > 0.01",
    ));
    Ok(out)
}

// ---------------------------------------------------------------- radial

pub const RADIAL_PACKINGS: usize = 20;
pub const RADIAL_EXPONENTS: [f64; 2] = [2.5, 3.0];

fn radial_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let n = cfg.grid;
    for i in 0..RADIAL_PACKINGS {
        let domain = if i % 2 == 0 {
            Domain::unit_disk()
        } else {
            Domain::Rect {
                x0: -1.0,
                x1: 1.0,
                y0: -0.5,
                y1: 0.5,
            }
        };
        let depth = 1 + i % 3;
        let spec = random_packing(rng, domain, 3.0, depth);
        let f = build_packing(&spec, ClassTarget::Ap { p: 3.0 })?;
        let area = domain.area();
        let params = |p: f64| [("packing", i as f64), ("depth", spec.depth() as f64), ("p", p)];
        for p in RADIAL_EXPONENTS {
            let fine = f.energy_on_grid(p, n)?;
            let coarse = f.energy_on_grid(p, n / 2)?;
            out.push(QuadratureReport::new(
                "radial_energy",
                &params(p),
                fine,
                area,
                2.0 * (fine - coarse).abs(),
                format!("overlap grid N={n}, closed-form annuli"),
            ));
            let q = f.integrate(|a, b| (a - (p - 1.0) * b) * (a + b).powf(p - 1.0), 1e-11);
            out.push(QuadratureReport::new(
                "radial_energy_quadrature",
                &params(p),
                q.value,
                area,
                q.error + 1e-12 * area,
                "Gauss-Kronrod in t",
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- solver

pub const CONST_DISK_K: f64 = 0.3;
pub const SOLVER_SUP_TOL: f64 = 0.01;
pub const AREA_SAMPLES: usize = 20;

/// Largest deviation of `Df` from `(1, k)` on `|z| ≤ 0.8`.
pub fn const_disk_error(sol: &PrincipalSolution, k: f64) -> f64 {
    let spec = sol.spec();
    let n = spec.n();
    (0..spec.len())
        .filter(|&i| spec.point(i / n, i % n).norm() <= 0.8)
        .map(|i| {
            let d = sol.deriv_at(i);
            (d.dz - 1.0).norm().max((d.dzbar - k).norm())
        })
        .fold(0.0, f64::max)
}

/// Largest `(|Δf_z| + |Δf_z̄|)/|Df|` against the radial oracle on `0.1 ≤ |z| ≤ 0.9`.
pub fn radial_error(sol: &PrincipalSolution, oracle: &RadialProfile) -> Result<f64> {
    let spec = sol.spec();
    let n = spec.n();
    let mut worst: f64 = 0.0;
    for i in 0..spec.len() {
        let z = spec.point(i / n, i % n);
        if (0.1..=0.9).contains(&z.norm()) {
            let d = radial_deriv(oracle, z)?;
            let s = sol.deriv_at(i);
            worst = worst.max(((s.dz - d.dz).norm() + (s.dzbar - d.dzbar).norm()) / d.opnorm());
        }
    }
    Ok(worst)
}

/// Grid floor of the oracle rows, whose 1% tolerance is stated at this size.
pub const ORACLE_GRID: usize = 1024;

fn solver_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let spec = cfg.spec();
    let label = grid_label(spec);
    let sp = Spectral::new(spec);
    let ospec = GridSpec::new(cfg.grid.max(ORACLE_GRID), cfg.half_side)?;
    let olabel = grid_label(ospec);

    let k = CONST_DISK_K;
    let src = GridSource::solve(&|s| BeltramiCoefficient::constant_disk(s, k), ospec, cfg.tol)?;
    out.push(QuadratureReport::new(
        "solver_const_disk",
        &[("k", k)],
        const_disk_error(&src.fine, k),
        SOLVER_SUP_TOL,
        0.0,
        olabel.clone(),
    ));
    let b1 = |s: &PrincipalSolution| s.b[0].re;
    out.push(QuadratureReport::new(
        "solver_const_disk_b1",
        &[("k", k)],
        b1(&src.fine),
        k,
        spread(b1(&src.fine), b1(&src.coarse), b1(&src.wide)),
        olabel.clone(),
    ));
    let (a, ac, aw) = (
        area_integral(&src.fine),
        area_integral(&src.coarse),
        area_integral(&src.wide),
    );
    out.push(QuadratureReport::new(
        "area_const_disk",
        &[("k", k)],
        a,
        PI * (1.0 - k * k),
        spread(a, ac, aw),
        olabel.clone(),
    ));

    let alpha = RadialCoefficient::constant(1.0 / 3.0)?;
    let oracle = rho_from_alpha(&alpha)?;
    let sol = solve_with(
        &Spectral::new(ospec),
        &BeltramiCoefficient::radial(ospec, &alpha)?,
        cfg.tol,
    )?;
    out.push(QuadratureReport::new(
        "solver_radial",
        &[("alpha", 1.0 / 3.0)],
        radial_error(&sol, &oracle)?,
        SOLVER_SUP_TOL,
        0.0,
        olabel,
    ));

    let mu = BeltramiCoefficient::random_smooth(spec, rng, k)?;
    let sol = solve_with(&sp, &mu, cfg.tol)?;
    let norm = mu.field().norm_l2();
    let ratio = sol
        .history
        .iter()
        .enumerate()
        .map(|(n, r)| r / (k.powi(n as i32) * norm / (1.0 - k)))
        .fold(0.0, f64::max);
    out.push(QuadratureReport::new(
        "solver_residual",
        &[("k", k), ("iterations", sol.iterations as f64)],
        ratio,
        1.0,
        0.0,
        label.clone(),
    ));

    for i in 0..AREA_SAMPLES {
        let k = rng.gen_range(0.05..=0.5);
        let seed: u64 = rng.gen();
        let build = seeded(seed, move |s, r| BeltramiCoefficient::random_smooth(s, r, k));
        let src = GridSource::solve(&build, spec, cfg.tol)?;
        let (f, c, w) = (
            area_integral(&src.fine),
            area_integral(&src.coarse),
            area_integral(&src.wide),
        );
        out.push(QuadratureReport::new(
            "area_inequality",
            &[("k", k), ("sample", i as f64)],
            f,
            PI,
            spread(f, c, w),
            label.clone(),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- inequalities

pub const MAIN_EXPONENTS: [f64; 4] = [2.0, 2.5, 3.0, 4.0];
pub const LP_EXPONENTS: [f64; 2] = [3.0, 3.5];
pub const RANDOM_SOURCES: usize = 10;
pub const RANDOM_K: f64 = 0.3;
pub const EXPINT_RANDOM_K: f64 = 0.9;
pub const EXPINT_RANDOM: usize = 3;

fn p_max(kd: f64) -> f64 {
    if kd == 1.0 {
        f64::INFINITY
    } else {
        2.0 * kd / (kd - 1.0)
    }
}

/// Power map of distortion `K` in the equality case at exponent `p`: at the
/// top exponent the weight vanishes on the power annulus, so a linear core
/// carries the energy.
fn equality_map(kd: f64, p: f64) -> burkholder::Result<PiecewiseRadialMap> {
    let r = if (p - p_max(kd)).abs() < 1e-12 { 0.5 } else { 0.0 };
    power_map(kd, r)
}

fn inequalities_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let spec = cfg.spec();
    let kd = cfg.k.unwrap_or(2.0);

    let lp: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or(LP_EXPONENTS.to_vec());
    let f = power_map(kd, 0.0)?;
    for p in &lp {
        out.push(check_lp_mean(Source::Radial(&f), kd, *p)?);
    }

    let main: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or(MAIN_EXPONENTS.to_vec());
    for p in &main {
        let map = equality_map(kd, *p)?;
        out.push(with_param(
            check_main_inequality(Source::Radial(&map), *p)?,
            "r",
            map_core(&map),
        ));
    }
    let p_rand = cfg
        .p
        .filter(|p| (2.0..=1.0 + 1.0 / RANDOM_K).contains(p))
        .unwrap_or(3.0);
    for i in 0..RANDOM_SOURCES {
        let seed: u64 = rng.gen();
        let build = seeded(seed, |s, r| BeltramiCoefficient::random_smooth(s, r, RANDOM_K));
        let src = GridSource::solve(&build, spec, cfg.tol)?;
        out.push(with_param(
            check_main_inequality(Source::Grid(&src), p_rand)?,
            "sample",
            i as f64,
        ));
    }

    let p_energy = cfg.p.unwrap_or(3.0);
    let map = equality_map(kd, p_energy)?;
    out.push(check_burkholder_energy(Source::Radial(&map), p_energy)?);
    let compressing = build_packing(
        &PackingSpec {
            domain: Domain::unit_disk(),
            nodes: vec![NodeSpec {
                exponent: Some(2.0),
                ..NodeSpec::power(Complex64::new(0.0, 0.0), 1.0, 0.0, 2.0)
            }],
        },
        ClassTarget::Any,
    )?;
    out.push(check_burkholder_energy(Source::Radial(&compressing), -2.0)?);

    out.push(check_llogl(Source::Radial(&PiecewiseRadialMap::identity(
        Domain::unit_disk(),
    )))?);
    out.push(check_llogl(Source::Radial(&f))?);
    for i in 0..RANDOM_SOURCES {
        let k = rng.gen_range(0.2..=0.4);
        let map = BumpMap::random(rng, spec, k)?;
        let src = GridSource::solve(&|s| map.coefficient(s), spec, cfg.tol)?;
        out.push(with_param(check_llogl(Source::Grid(&src))?, "sample", i as f64));
    }

    let alphas: Vec<(&str, RadialCoefficient)> = vec![
        ("const 0", RadialCoefficient::constant(0.0)?),
        ("const 0.25", RadialCoefficient::constant(0.25)?),
        ("const 0.5", RadialCoefficient::constant(0.5)?),
        ("const 0.75", RadialCoefficient::constant(0.75)?),
        ("t", RadialCoefficient::linear(1.0)?),
    ];
    for (i, (name, a)) in alphas.iter().enumerate() {
        let mut r = with_param(check_expint_radial(a)?, "alpha_index", i as f64);
        r.grid = format!("{}; alpha = {name}", r.grid);
        out.push(r);
    }
    for (i, (name, a)) in alphas
        .iter()
        .enumerate()
        .filter(|(_, (n, _))| *n == "const 0.5" || *n == "t")
    {
        let mut r = check_expint_grid(&|s| Ok(BeltramiCoefficient::radial(s, a)?.field().clone()), spec)?;
        r = with_param(r, "alpha_index", i as f64);
        r.grid = format!("{}; alpha = {name}", r.grid);
        out.push(r);
    }
    for i in 0..EXPINT_RANDOM {
        let seed: u64 = rng.gen();
        let build = seeded(seed, |s, r| BeltramiCoefficient::random_smooth(s, r, EXPINT_RANDOM_K));
        let r = check_expint_grid(&|s| Ok(build(s)?.field().clone()), spec)?;
        out.push(with_param(r, "sample", i as f64));
    }

    let loginv: Vec<f64> = cfg.k.map(|k| vec![k]).unwrap_or(vec![2.0, 3.0]);
    for k in loginv {
        let r = check_loginv(&RadialProfile::power_exponent(k, 0.0, 1.0)?)?;
        out.push(with_param(r.report, "ungrouped", r.ungrouped_value));
    }
    Ok(out)
}

fn map_core(map: &PiecewiseRadialMap) -> f64 {
    map.nodes().first().map(|n| n.inner()).unwrap_or(0.0)
}

// ---------------------------------------------------------------- interpolation

pub const BELTRAMI_K: f64 = 0.3;
pub const BELTRAMI_P: f64 = 3.0;
pub const BELTRAMI_RADII: [f64; 3] = [0.1, 0.25, 0.5];
pub const CLOSED_FORM_TOL: f64 = 1e-8;
pub const CONSTANT_TOL: f64 = 1e-12;
pub const COUNTEREXAMPLE_DELTAS: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

/// Sampling used for solver-backed families, where each `λ` costs a solve.
pub fn beltrami_sampling() -> LambdaSampling {
    LambdaSampling {
        points: 16,
        max_points: 64,
        ..LambdaSampling::disk()
    }
}

fn support_rows(name: &str, d: &SupportLineDiag, label: &str) -> Vec<QuadratureReport> {
    let params = [("theta", d.theta), ("p_theta", d.p_theta)];
    let check = |c: &str| format!("support_line_{c}_{name}");
    let mut rows = vec![
        QuadratureReport::new(&check("mass"), &params, d.mass, 1.0, 1e-10, label),
        QuadratureReport::new(&check("envelope"), &params, d.envelope_worst, 1e-10, 0.0, label),
        QuadratureReport::new(&check("equality"), &params, d.equality_gap, 1e-9, 0.0, label),
    ];
    if d.harnack_applicable {
        rows.push(QuadratureReport::new(
            &check("harnack"),
            &params,
            d.harnack_gap,
            1e-10,
            0.0,
            label,
        ));
    }
    rows
}

fn interpolation_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let want = |f: Family| cfg.family == Family::All || cfg.family == f;

    if want(Family::Constant) {
        let c = Complex64::new(0.6, -0.8) * 1.7;
        for (form, samp) in [
            (Form::HalfPlane, LambdaSampling::half_plane()),
            (Form::Disk, LambdaSampling::disk()),
        ] {
            let f = AnalyticFamily::constant(c, vec![0.25; 4], form)?;
            let r = check_interpolation_bound(&f, 1.5, 4.0, &[0.1, 0.5, 0.9], &samp, CONSTANT_TOL)?;
            out.reports.extend(r.rows());
        }
        let mut worst: f64 = 0.0;
        for i in 0..=50 {
            let r = i as f64 / 50.0;
            let th = mobius(Complex64::new(r, 0.0)).re;
            for (p0, p1) in [(f64::INFINITY, 2.0), (1.5, 4.0), (1.0, f64::INFINITY), (2.0, 3.0)] {
                let a = p_interp(p0, p1, r, Form::Disk)?;
                let b = p_interp(p1, p0, th, Form::HalfPlane)?;
                if a != b {
                    worst = worst.max(((a - b) / a).abs());
                }
                let ba = interpolation_bound(1.3, 0.7, r, Form::Disk);
                let bb = interpolation_bound(0.7, 1.3, th, Form::HalfPlane);
                worst = worst.max((ba - bb).abs() / ba);
            }
        }
        out.push(QuadratureReport::new(
            "mobius_consistency",
            &[("radii", 51.0)],
            worst,
            1e-10,
            0.0,
            "exact",
        ));
    }

    if want(Family::Exponential) || want(Family::TwoPoint) {
        let h: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.5)).collect();
        let w = vec![1.0 / 40.0; 40];
        let ts: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let mut monotone: f64 = 0.0;
        let f = AnalyticFamily::exponential(h, w)?;
        for l in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.7, -2.0),
            Complex64::new(2.0, 5.0),
        ] {
            let ps = [0.5, 1.0, 2.0, 3.0, 8.0, f64::INFINITY];
            for pair in ps.windows(2) {
                let (a, b) = (f.norm(l, pair[0])?, f.norm(l, pair[1])?);
                monotone = monotone.max((a - b) / b);
            }
        }
        out.push(QuadratureReport::new(
            "norm_monotonicity",
            &[],
            monotone,
            1e-12,
            0.0,
            "probability weights",
        ));
        if want(Family::Exponential) {
            let r = check_interpolation_bound(&f, 1.0, 3.0, &ts, &LambdaSampling::half_plane(), CLOSED_FORM_TOL)?;
            out.reports.extend(r.rows());
            let d = support_line(&f, 0.4, 1.5, 6.0, &LambdaSampling::half_plane())?;
            out.reports.extend(support_rows("exponential", &d, "closed form"));
        }
        if want(Family::TwoPoint) {
            let f = AnalyticFamily::two_point();
            let r = check_interpolation_bound(&f, 2.0, 5.0, &ts, &LambdaSampling::half_plane(), CLOSED_FORM_TOL)?;
            out.reports.extend(r.rows());
            for theta in [0.2, 0.5, 0.8] {
                let d = support_line(&f, theta, 2.0, 5.0, &LambdaSampling::half_plane())?;
                out.reports.extend(support_rows("two_point", &d, "closed form"));
            }
        }
    }

    if want(Family::Beltrami) {
        let seed: u64 = rng.gen();
        let spec = cfg.family_spec();
        let build = seeded(seed, |s, r| BeltramiCoefficient::random_smooth(s, r, BELTRAMI_K));
        let p = cfg
            .p
            .filter(|p| (2.0..=1.0 + 1.0 / BELTRAMI_K).contains(p))
            .unwrap_or(BELTRAMI_P);
        let lambda_circ = 1.0 / (p - 1.0);
        let mut radii = BELTRAMI_RADII.to_vec();
        if !radii.iter().any(|r| (r - lambda_circ).abs() < 1e-12) {
            radii.push(lambda_circ);
        }
        let r = check_beltrami_interpolation(&build, spec, p, &radii, &beltrami_sampling(), cfg.tol)?;
        let mut rows = r.rows();
        for row in rows.iter_mut() {
            row.params.insert("p".into(), p);
            row.params.insert("lambda_circ".into(), lambda_circ);
        }
        out.reports.extend(rows);
        out.extras.insert("beltrami_family".into(), serde_json::to_value(&r)?);

        // Support lines on the compact piece where |Ψ| stays in [1/2, 2].
        let fam = AnalyticFamily::beltrami(build(spec)?, p, cfg.tol)?.mobius();
        let mut keep: Vec<usize> = (0..fam.len()).collect();
        for x in [0.2, 0.5, 1.0, 3.0] {
            let v = fam.values(Complex64::new(x, 0.0))?;
            keep.retain(|&i| (0.5..=2.0).contains(&v[i].norm()));
        }
        let sub = fam.restrict(keep)?;
        let samp = LambdaSampling {
            points: 4,
            max_points: 4,
            levels: vec![0.2, 1.0],
            extent: 1.0,
            ..LambdaSampling::half_plane()
        };
        let d = support_line(&sub, 0.5, 2.0, 8.0, &samp)?;
        out.reports.extend(support_rows("beltrami", &d, &grid_label(spec)));
    }

    if want(Family::Counterexample) {
        let theta = 0.5;
        let r = counterexample_demo(&default_counterexample_g, theta, &COUNTEREXAMPLE_DELTAS)?;
        let bound = interpolation_bound(r.m0, r.m1, theta, Form::HalfPlane);
        for (delta, m) in &r.truncations {
            out.push(
                QuadratureReport::new(
                    "counterexample_truncated",
                    &[("theta", theta), ("p_theta", r.p_theta), ("delta", *delta)],
                    *m,
                    bound,
                    0.0,
                    "adaptive quadrature in log x",
                )
                .with_verdict(Verdict::Demonstrated),
            );
        }
        for (delta, m, b) in &r.companion {
            out.push(QuadratureReport::new(
                "counterexample_companion",
                &[("theta", theta), ("p_theta", r.p_theta), ("delta", *delta)],
                *m,
                *b,
                1e-9 * b,
                "adaptive quadrature in log x",
            ));
        }
        out.extras.insert("counterexample".into(), serde_json::to_value(&r)?);
    }
    Ok(out)
}
