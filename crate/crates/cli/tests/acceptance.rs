//! End-to-end acceptance battery: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use burkholder::radial::RadialCoefficient;
use burkholder::report::{QuadratureReport, Verdict};
use burkholder::solver::{solve_principal, BeltramiCoefficient};
use burkholder_cli::config::RunConfig;
use burkholder_cli::suites::{self, Suite, SuiteOutput};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn rows<'a>(out: &'a SuiteOutput, check: &str) -> Vec<&'a QuadratureReport> {
    out.reports.iter().filter(|r| r.check == check).collect()
}

fn param(r: &QuadratureReport, key: &str) -> f64 {
    r.params.get(key).copied().unwrap_or(f64::NAN)
}

fn rel(v: f64, want: f64) -> f64 {
    (v - want).abs() / want.abs()
}

fn within(r: &QuadratureReport, want: f64, tol: f64) -> bool {
    rel(r.value, want) <= tol && rel(r.bound, want) <= tol
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn run_suite(suite: Suite, cfg: &RunConfig) -> (SuiteOutput, Duration) {
    let (out, dt) = timed(|| suites::run(suite, cfg));
    (
        out.unwrap_or_else(|e| panic!("suite {} failed to run: {e:#}", suite.name())),
        dt,
    )
}

fn with_grid(n: usize) -> RunConfig {
    RunConfig {
        grid: n,
        ..RunConfig::default()
    }
}

fn criterion_1(core: &SuiteOutput, dt: Duration) -> Outcome {
    let norm = rows(core, "normalization");
    let exact = norm.len() == 7 && norm.iter().all(|r| r.value == 1.0);
    let tri = rows(core, "trichotomy");
    let probes: f64 = tri.iter().map(|r| param(r, "probes")).sum();
    let signs = tri.iter().all(|r| r.value <= 1e-8);
    let dual = rows(core, "hat_duality");
    let dual_ok = dual.len() == 1 && dual[0].value <= 1e-12;
    let worst_affine = tri
        .iter()
        .filter(|r| param(r, "sign") == 0.0)
        .map(|r| r.value)
        .fold(0.0, f64::max);
    outcome(
        exact && signs && probes >= 9990.0 && dual_ok && dt < Duration::from_secs(5),
        format!(
            "B_p(Id)=1 at 7 exponents; {probes} probes; worst affine {worst_affine:.1e}; duality {:.1e}; {:.2}s",
            dual.first().map_or(f64::NAN, |r| r.value),
            dt.as_secs_f64()
        ),
    )
}

fn criterion_2(radial: &SuiteOutput, dt: Duration) -> Outcome {
    let r = rows(radial, "radial_energy");
    let worst = r.iter().map(|r| rel(r.value, r.bound)).fold(0.0, f64::max);
    let packings = r
        .iter()
        .map(|r| param(r, "packing") as usize)
        .max()
        .map_or(0, |m| m + 1);
    let depth = r.iter().map(|r| param(r, "depth")).fold(0.0, f64::max);
    outcome(
        packings == 20 && r.len() == 40 && depth <= 3.0 && worst <= 3e-3 && dt < Duration::from_secs(120),
        format!(
            "{packings} packings at N=2048, worst |E/|Ω| - 1| = {worst:.1e}; {:.1}s",
            dt.as_secs_f64()
        ),
    )
}

fn criterion_3(ineq: &SuiteOutput) -> Outcome {
    let r = rows(ineq, "lp_mean");
    let at = |p: f64| r.iter().find(|r| param(r, "p") == p && param(r, "K") == 2.0);
    let (p3, p35) = (at(3.0), at(3.5));
    let ok = p3.is_some_and(|r| within(r, 4.0, 5e-3)) && p35.is_some_and(|r| within(r, 8.0, 1e-2));
    outcome(
        ok,
        format!(
            "K=2: p=3 mean {:.6}, p=3.5 mean {:.6}",
            p3.map_or(f64::NAN, |r| r.value),
            p35.map_or(f64::NAN, |r| r.value)
        ),
    )
}

fn criterion_4(ineq: &SuiteOutput, dt: Duration) -> Outcome {
    let main = rows(ineq, "main");
    let (radial, grid): (Vec<_>, Vec<_>) = main.into_iter().partition(|r| !r.params.contains_key("sample"));
    let eq_ok = [2.0, 2.5, 3.0, 4.0]
        .iter()
        .all(|&p| radial.iter().any(|r| param(r, "p") == p && within(r, PI, 5e-3)));
    let grid_ok = grid.len() == 10
        && grid
            .iter()
            .all(|r| param(r, "p") == 3.0 && r.value <= PI + r.est_error && r.est_error <= 0.02 * PI);
    let worst_est = grid.iter().map(|r| r.est_error / PI).fold(0.0, f64::max);
    outcome(
        eq_ok && grid_ok && dt < Duration::from_secs(300),
        format!(
            "power map equality at p in {{2,2.5,3,4}}; 10 random k=0.3 at N=1024 below π, worst est {:.2}% of π; suite {:.1}s",
            100.0 * worst_est,
            dt.as_secs_f64()
        ),
    )
}

fn criterion_5(solver: &SuiteOutput) -> Outcome {
    let one = |c: &str| rows(solver, c).first().map(|r| (*r).clone());
    let (disk, radial, resid) = (one("solver_const_disk"), one("solver_radial"), one("solver_residual"));
    let spec_ok = [&disk, &radial]
        .iter()
        .all(|r| r.as_ref().is_some_and(|r| r.grid.contains("N=1024")));
    let (solve, dt) = timed(|| {
        let spec = burkholder::grid::GridSpec::new(1024, 2.0).unwrap();
        let mu = BeltramiCoefficient::radial(spec, &RadialCoefficient::constant(1.0 / 3.0).unwrap()).unwrap();
        solve_principal(&mu, 1e-10)
    });
    let ok = spec_ok
        && disk.as_ref().is_some_and(|r| r.value <= 0.01)
        && radial.as_ref().is_some_and(|r| r.value <= 0.01)
        && resid.as_ref().is_some_and(|r| r.value <= 1.0)
        && solve.is_ok()
        && dt < Duration::from_secs(60);
    outcome(
        ok,
        format!(
            "const disk sup err {:.2}%, radial rel err {:.3}%, residual ratio {:.3}; N=1024 solve {:.1}s",
            100.0 * disk.map_or(f64::NAN, |r| r.value),
            100.0 * radial.map_or(f64::NAN, |r| r.value),
            resid.map_or(f64::NAN, |r| r.value),
            dt.as_secs_f64()
        ),
    )
}

fn criterion_6(solver: &SuiteOutput) -> Outcome {
    let area = rows(solver, "area_inequality");
    let ineq_ok = area.len() == 20 && area.iter().all(|r| param(r, "k") <= 0.5 && r.value <= PI + r.est_error);
    let disk = rows(solver, "area_const_disk");
    let k = 0.3;
    let disk_ok = disk.len() == 1 && rel(disk[0].value, PI * (1.0 - k * k)) <= 5e-3;
    outcome(
        ineq_ok && disk_ok,
        format!(
            "20 random solutions within π + est; const disk area/π(1-k²) - 1 = {:.1e}",
            disk.first().map_or(f64::NAN, |r| r.value / (PI * (1.0 - k * k)) - 1.0)
        ),
    )
}

fn criterion_7(ineq: &SuiteOutput) -> Outcome {
    let r = rows(ineq, "llogl");
    let (radial, grid): (Vec<_>, Vec<_>) = r.into_iter().partition(|r| !r.params.contains_key("sample"));
    let identity = radial
        .first()
        .is_some_and(|r| within(r, PI, 1e-9) && r.verdict == Verdict::Equality);
    let power = radial.get(1).is_some_and(|r| within(r, 2.0 * PI, 5e-3));
    let grid_ok = grid.len() == 10 && grid.iter().all(|r| r.slack > r.est_error);
    let min_margin = grid.iter().map(|r| r.slack / r.est_error).fold(f64::INFINITY, f64::min);
    outcome(
        identity && power && grid_ok,
        format!("identity equality, K=2 power map 2π; 10 solver maps, min slack/est {min_margin:.1}"),
    )
}

fn criterion_8(ineq: &SuiteOutput) -> Outcome {
    let r = rows(ineq, "expint");
    let closed: Vec<_> = r.iter().filter(|r| !r.grid.contains("grid")).collect();
    let spectral: Vec<_> = r.iter().filter(|r| r.grid.contains("grid")).collect();
    let alpha = |r: &QuadratureReport| param(r, "alpha_index");
    // Indices 2 and 4 are α ≡ 0.5 and α(t) = t.
    let closed_ok = [2.0, 4.0]
        .iter()
        .all(|&i| closed.iter().any(|r| alpha(r) == i && rel(r.value, PI) <= 5e-3));
    let spectral_ok = [2.0, 4.0].iter().all(|&i| {
        spectral
            .iter()
            .any(|r| alpha(r) == i && (r.value - PI).abs() <= r.est_error)
    });
    let random: Vec<_> = spectral.iter().filter(|r| r.params.contains_key("sample")).collect();
    let random_ok = !random.is_empty() && random.iter().all(|r| r.value <= PI + r.est_error);
    outcome(
        closed_ok && spectral_ok && random_ok,
        format!(
            "closed-form π for α≡0.5 and α=t; spectral within budget; {} random |μ|≤0.9",
            random.len()
        ),
    )
}

fn criterion_9(ineq: &SuiteOutput) -> Outcome {
    let r = rows(ineq, "loginv");
    let ok = [2.0, 3.0]
        .iter()
        .all(|&k| r.iter().any(|r| param(r, "K") == k && within(r, PI * (k - 1.0), 5e-3)));
    let ungrouped: Vec<String> = r.iter().map(|r| format!("{:.4}", param(r, "ungrouped"))).collect();
    outcome(
        ok,
        format!("both sides π(K-1) at K=2,3; ungrouped reading {}", ungrouped.join(", ")),
    )
}

fn criterion_10(interp: &SuiteOutput) -> Outcome {
    let constant = rows(interp, "interpolation_constant");
    let const_ok = !constant.is_empty() && constant.iter().all(|r| (r.value - r.bound).abs() <= 1e-12 * r.bound);
    let belt = rows(interp, "interpolation_beltrami");
    let radii_ok = [0.1, 0.25, 0.5]
        .iter()
        .all(|&t| belt.iter().any(|r| param(r, "t") == t && r.verdict.ok()))
        && belt.iter().all(|r| r.verdict.ok() && param(r, "p") == 3.0)
        && belt.iter().any(|r| param(r, "t") == param(r, "lambda_circ"));
    let env: Vec<_> = interp
        .reports
        .iter()
        .filter(|r| r.check.starts_with("support_line_equality"))
        .collect();
    let env_ok = !env.is_empty() && env.iter().all(|r| r.value <= 1e-9);
    let mob = rows(interp, "mobius_consistency");
    let mob_ok = mob.len() == 1 && mob[0].value <= 1e-10;
    let trunc = rows(interp, "counterexample_truncated");
    let growth = match (trunc.first(), trunc.last()) {
        (Some(a), Some(b)) if trunc.len() >= 4 => b.value / a.value,
        _ => f64::NAN,
    };
    let demo_ok = growth >= 10.0 && trunc.iter().all(|r| r.verdict == Verdict::Demonstrated);
    outcome(
        const_ok && radii_ok && env_ok && mob_ok && demo_ok,
        format!(
            "constants exact; Beltrami k=0.3 p=3 at {} radii; envelope {:.1e}; Möbius {:.1e}; counterexample growth {:.1}x",
            belt.len(),
            env.iter().map(|r| r.value).fold(0.0, f64::max),
            mob.first().map_or(f64::NAN, |r| r.value),
            growth
        ),
    )
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_burkholder");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut bytes = Vec::new();
    for d in &dirs {
        let status = Command::new(bin)
            .args(["verify", "all", "--seed", "7", "--out"])
            .arg(d.path())
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        if status.code() != Some(0) {
            return outcome(false, format!("verify all exited with {status}"));
        }
        bytes.push(std::fs::read(d.path().join("all.json")).expect("report written"));
    }
    outcome(
        bytes[0] == bytes[1],
        format!(
            "two runs, {} bytes each, identical: {}",
            bytes[0].len(),
            bytes[0] == bytes[1]
        ),
    )
}

fn main() -> ExitCode {
    let defaults = RunConfig::default();
    let (core, core_dt) = run_suite(Suite::Core, &defaults);
    let (radial, radial_dt) = run_suite(Suite::Radial, &with_grid(2048));
    let (ineq, ineq_dt) = run_suite(Suite::Inequalities, &with_grid(1024));
    let (solver, _) = run_suite(Suite::Solver, &defaults);
    let (interp, _) = run_suite(Suite::Interpolation, &defaults);

    let results = [
        criterion_1(&core, core_dt),
        criterion_2(&radial, radial_dt),
        criterion_3(&ineq),
        criterion_4(&ineq, ineq_dt),
        criterion_5(&solver),
        criterion_6(&solver),
        criterion_7(&ineq),
        criterion_8(&ineq),
        criterion_9(&ineq),
        criterion_10(&interp),
        criterion_11(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        println!(
            "criterion {:>2}: {}  {}",
            i + 1,
            if r.ok { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += usize::from(!r.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
