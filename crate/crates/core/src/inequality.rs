//! Quadrature checks of the sharp integral inequalities for Burkholder
//! energies and their limiting forms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::functional::{burkholder_p, PlanarDeriv};
use crate::grid::{GridField, GridSpec};
use crate::quadrature::{integrate_to_zero, Integral};
use crate::radial::{classify_profile, PiecewiseRadialMap, RadialCoefficient, RadialProfile};
use crate::report::QuadratureReport;
use crate::solver::{solve_with, BeltramiCoefficient, PrincipalSolution};
use crate::spectral::Spectral;

const QUAD_TOL: f64 = 1e-11;
/// Largest `|Sω|` on `1.1 ≤ |z| ≤ 1.5` for a grid map to count as the
/// identity on the unit circle.
pub const BOUNDARY_DEFECT_TOL: f64 = 1e-2;

/// Weight `w = 1 − p|μ|/(1 + |μ|)` of the weighted inequality; the measure is
/// `dσ = w dz/π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureWeight {
    pub p: f64,
}

impl MeasureWeight {
    pub fn weight(&self, m: f64) -> f64 {
        1.0 - self.p * m / (1.0 + m)
    }

    /// `[1 − pk/(1+k), 1]`, the range of `w` when `|μ| ≤ k`.
    pub fn range(&self, k: f64) -> (f64, f64) {
        (self.weight(k), 1.0)
    }
}

/// A coefficient solved at `(N, L)`, `(N/2, L)` and `(N, 2L)`. The spread of
/// a functional across the three runs estimates its discretization and
/// periodization error.
#[derive(Clone, Debug)]
pub struct GridSource {
    pub fine: PrincipalSolution,
    pub coarse: PrincipalSolution,
    pub wide: PrincipalSolution,
}

/// `2|fine − coarse| + |coarse − wide|`: the refinement difference bounds a
/// first-order error up to pre-asymptotic drift, hence the factor two; the
/// box doubling measures periodization.
pub fn spread(fine: f64, coarse: f64, wide: f64) -> f64 {
    2.0 * (fine - coarse).abs() + (coarse - wide).abs()
}

pub type CoefficientBuilder<'a> = &'a dyn Fn(GridSpec) -> Result<BeltramiCoefficient>;

impl GridSource {
    pub fn solve(build: CoefficientBuilder<'_>, spec: GridSpec, tol: f64) -> Result<Self> {
        let run = |s: GridSpec| -> Result<PrincipalSolution> { solve_with(&Spectral::new(s), &build(s)?, tol) };
        let l = spec.half_side();
        Ok(GridSource {
            fine: run(spec)?,
            coarse: run(GridSpec::new(spec.n() / 2, l)?)?,
            wide: run(GridSpec::new(spec.n(), 2.0 * l)?)?,
        })
    }

    pub fn k(&self) -> f64 {
        self.fine.mu.k()
    }

    fn spec(&self) -> GridSpec {
        self.fine.spec()
    }

    fn label(&self) -> String {
        let s = self.spec();
        format!("grid N={} L={}", s.n(), s.half_side())
    }

    /// Value on the fine grid with its [`spread`] error estimate.
    fn estimate(&self, f: impl Fn(&PrincipalSolution) -> f64) -> (f64, f64) {
        let (a, b, c) = (f(&self.fine), f(&self.coarse), f(&self.wide));
        (a, spread(a, b, c))
    }

    /// Largest `|f_z − 1|` on `1.1 ≤ |z| ≤ 1.5`; zero for maps equal to the
    /// identity outside the unit disk.
    pub fn boundary_defect(&self) -> f64 {
        let spec = self.spec();
        let n = spec.n();
        (0..spec.len())
            .filter(|&i| (1.1..=1.5).contains(&spec.point(i / n, i % n).norm()))
            .map(|i| self.fine.s_omega.values()[i].norm())
            .fold(0.0, f64::max)
    }

    fn require_identity_boundary(&self) -> Result<()> {
        let d = self.boundary_defect();
        if d > BOUNDARY_DEFECT_TOL {
            return Err(Error::Class(format!(
                "solution is not the identity outside the unit disk (defect {d:.3e})"
            )));
        }
        Ok(())
    }
}

/// Source of a check.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Radial(&'a PiecewiseRadialMap),
    Grid(&'a GridSource),
}

/// Distortion `K = max(σ_max, 1/σ_min)` of a piecewise radial map.
pub fn radial_distortion(map: &PiecewiseRadialMap) -> f64 {
    map.nodes()
        .iter()
        .map(|n| {
            let (lo, hi) = n.profile.log_slope_range();
            hi.max(1.0 / lo)
        })
        .fold(1.0, f64::max)
}

fn k_of(kd: f64) -> f64 {
    if kd.is_infinite() {
        1.0
    } else {
        (kd - 1.0) / (kd + 1.0)
    }
}

fn distortion_of(k: f64) -> f64 {
    if k >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + k) / (1.0 - k)
    }
}

fn source_k(src: Source<'_>) -> f64 {
    match src {
        Source::Radial(m) => k_of(radial_distortion(m)),
        Source::Grid(g) => g.k(),
    }
}

fn require_identity_radial(map: &PiecewiseRadialMap) -> Result<()> {
    if (map.a - 1.0).norm() > 1e-12 || map.b.norm() > 1e-12 {
        return Err(Error::Class("map is not the identity on the boundary".into()));
    }
    Ok(())
}

fn label_radial(map: &PiecewiseRadialMap) -> String {
    format!("radial quadrature, {} annuli", map.nodes().len())
}

/// `∫_{B(0,R)} G(|h_z|, |h_z̄|)` for a single radial profile.
pub fn profile_integral(profile: &RadialProfile, g: impl Fn(f64, f64) -> f64, tol: f64) -> Integral {
    let mut f = |t: f64| {
        let (rho, d) = profile.eval(t);
        2.0 * PI * t * g(0.5 * (d + rho / t).abs(), 0.5 * (d - rho / t).abs())
    };
    let r = profile.inner();
    let mut out = profile.integrate_annulus(&mut f, tol);
    if let Some(s) = profile.core_slope() {
        out.value += g(s, 0.0) * PI * r * r;
    }
    out
}

fn disk_sum(sol: &PrincipalSolution, g: &dyn Fn(&PlanarDeriv, f64) -> f64) -> f64 {
    sol.disk_integral(|d, mu| g(d, mu.norm()))
}

fn quad_error(i: &Integral, scale: f64) -> f64 {
    if i.converged {
        i.error + 1e-12 * scale.abs()
    } else {
        f64::INFINITY
    }
}

/// `∫_D (1 − p|μ|/(1+|μ|)) |Df|^p ≤ π` for maps conformal outside the disk.
pub fn check_main_inequality(src: Source<'_>, p: f64) -> Result<QuadratureReport> {
    let k = source_k(src);
    let upper = if k > 0.0 { 1.0 + 1.0 / k } else { f64::INFINITY };
    if !(p >= 2.0 && p <= upper * (1.0 + 1e-12)) {
        return domain(format!("p = {p} outside [2, 1 + 1/k] for k = {k}"));
    }
    let w = MeasureWeight { p };
    match src {
        Source::Radial(map) => {
            let bound = map.domain.area();
            // The weighted density equals B_p(Df) pointwise.
            let (value, err) = match map.energy_analytic(p) {
                Ok(v) if map.class_tags(p, f64::INFINITY).expanding => (v, 1e-12 * bound),
                _ => {
                    let i = map.integrate(|a, b| (a - (p - 1.0) * b) * (a + b).powf(p - 1.0), QUAD_TOL);
                    (i.value, quad_error(&i, bound))
                }
            };
            Ok(QuadratureReport::new(
                "main",
                &[("p", p), ("k", k)],
                value,
                bound,
                err,
                label_radial(map),
            ))
        }
        Source::Grid(g) => {
            let (value, err) = g.estimate(|s| disk_sum(s, &|d, m| w.weight(m) * d.opnorm().powf(p)));
            Ok(QuadratureReport::new(
                "main",
                &[("p", p), ("k", k)],
                value,
                PI,
                err,
                g.label(),
            ))
        }
    }
}

/// `∫_Ω B_p(Df) ≤ |Ω|` for identity boundary values; `p ≥ 2` on the
/// expanding side and `−2/(K−1) ≤ p ≤ 0` on the compressing side.
pub fn check_burkholder_energy(src: Source<'_>, p: f64) -> Result<QuadratureReport> {
    let kd = distortion_of(source_k(src));
    let (lo, hi) = if kd == 1.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (-2.0 / (kd - 1.0), 2.0 * kd / (kd - 1.0))
    };
    let params = [("p", p), ("K", kd)];
    if p >= 2.0 {
        if p > hi * (1.0 + 1e-12) {
            return Err(Error::Class(format!("p = {p} exceeds 2K/(K-1) = {hi}")));
        }
    } else if p <= 0.0 {
        if p < lo * (1.0 + 1e-12) {
            return Err(Error::Class(format!("p = {p} below -2/(K-1) = {lo}")));
        }
    } else {
        return domain(format!("energy check needs p >= 2 or p <= 0, got {p}"));
    }
    match src {
        Source::Radial(map) => {
            require_identity_radial(map)?;
            let tags = map.class_tags(p, f64::INFINITY);
            if p >= 2.0 && !tags.expanding {
                return Err(Error::Class("p >= 2 needs an expanding map".into()));
            }
            if p <= 0.0 && !tags.compressing {
                return Err(Error::Class("p <= 0 needs a compressing map".into()));
            }
            let bound = map.domain.area();
            let value = map.energy_analytic(p)?;
            Ok(QuadratureReport::new(
                "burkholder_energy",
                &params,
                value,
                bound,
                1e-12 * bound,
                label_radial(map),
            ))
        }
        Source::Grid(g) => {
            if p <= 0.0 {
                return Err(Error::Class("grid sources are not compressing maps".into()));
            }
            g.require_identity_boundary()?;
            let (value, err) = g.estimate(|s| disk_sum(s, &|d, _| burkholder_p(d, p).unwrap_or(f64::NAN)));
            Ok(QuadratureReport::new(
                "burkholder_energy",
                &params,
                value,
                PI,
                err,
                g.label(),
            ))
        }
    }
}

fn llogl_lhs(a: f64, b: f64) -> f64 {
    (1.0 + 2.0 * (a + b).ln()) * (a * a - b * b)
}

/// `∫(1 + log|Df|²) J ≤ ∫|Df|²` for identity boundary values.
pub fn check_llogl(src: Source<'_>) -> Result<QuadratureReport> {
    match src {
        Source::Radial(map) => {
            require_identity_radial(map)?;
            let lhs = map.integrate(llogl_lhs, QUAD_TOL);
            let rhs = map.integrate(|a, b| (a + b) * (a + b), QUAD_TOL);
            let err = quad_error(&lhs, rhs.value) + quad_error(&rhs, rhs.value);
            Ok(QuadratureReport::new(
                "llogl",
                &[],
                lhs.value,
                rhs.value,
                err,
                label_radial(map),
            ))
        }
        Source::Grid(g) => {
            g.require_identity_boundary()?;
            let (lhs, e1) = g.estimate(|s| disk_sum(s, &|d, _| llogl_lhs(d.dz.norm(), d.dzbar.norm())));
            let (rhs, e2) = g.estimate(|s| disk_sum(s, &|d, _| d.opnorm().powi(2)));
            Ok(QuadratureReport::new(
                "llogl",
                &[("k", g.k())],
                lhs,
                rhs,
                e1 + e2,
                g.label(),
            ))
        }
    }
}

/// `∫_D (1 − |μ|) e^{|μ|} |exp Sμ| ≤ π` for radial `μ = −(z/z̄)α(|z|)`, with
/// `Sμ = 2∫_{|z|}^1 α(s)/s ds − α(|z|)` in closed form.
pub fn check_expint_radial(alpha: &RadialCoefficient) -> Result<QuadratureReport> {
    let mut f = |t: f64| {
        let a = alpha.eval(t);
        2.0 * PI * t * (1.0 - a) * (a + alpha.beurling(t)).exp()
    };
    let i = integrate_to_zero(&mut f, 1.0, 1e-10);
    Ok(QuadratureReport::new(
        "expint",
        &[("sup_alpha", alpha.sup())],
        i.value,
        PI,
        quad_error(&i, PI),
        "radial quadrature, closed-form S",
    ))
}

/// `∫_D (1 − |μ|) e^{|μ|} |exp Sμ|` with `Sμ` from the spectral transform.
pub fn expint_grid_value(mu: &GridField) -> Result<f64> {
    let spec = mu.spec();
    if mu.max_abs() > 1.0 + 1e-15 {
        return domain("expint needs |mu| <= 1");
    }
    let s = Spectral::new(spec).beurling(mu);
    Ok(spec
        .disk_cells(Complex64::new(0.0, 0.0), 1.0)
        .into_iter()
        .map(|(i, w)| {
            let m = mu.values()[i].norm();
            w * (1.0 - m) * (m + s.values()[i].re).exp()
        })
        .sum())
}

/// Spectral form of the exponential integrability check; the estimate runs
/// the same three grids as [`GridSource`].
pub fn check_expint_grid(build: &dyn Fn(GridSpec) -> Result<GridField>, spec: GridSpec) -> Result<QuadratureReport> {
    let l = spec.half_side();
    let a = expint_grid_value(&build(spec)?)?;
    let b = expint_grid_value(&build(GridSpec::new(spec.n() / 2, l)?)?)?;
    let c = expint_grid_value(&build(GridSpec::new(spec.n(), 2.0 * l)?)?)?;
    let k = build(spec)?.max_abs();
    Ok(QuadratureReport::new(
        "expint",
        &[("k", k)],
        a,
        PI,
        spread(a, b, c),
        format!("grid N={} L={l}, spectral S", spec.n()),
    ))
}

/// `2K/(2K − p(K−1))`.
pub fn lp_mean_bound(kd: f64, p: f64) -> f64 {
    2.0 * kd / (2.0 * kd - p * (kd - 1.0))
}

/// `(1/|Ω|)∫|Df|^p ≤ 2K/(2K − p(K−1))` for `K`-quasiconformal maps with
/// identity boundary values.
pub fn check_lp_mean(src: Source<'_>, kd: f64, p: f64) -> Result<QuadratureReport> {
    if !(kd >= 1.0) {
        return domain(format!("K = {kd} must be >= 1"));
    }
    if !(p >= 2.0) || (kd > 1.0 && p >= 2.0 * kd / (kd - 1.0)) {
        return domain(format!("p = {p} outside [2, 2K/(K-1)) for K = {kd}"));
    }
    let actual = distortion_of(source_k(src));
    if actual > kd * (1.0 + 1e-9) {
        return Err(Error::Class(format!("source distortion {actual} exceeds K = {kd}")));
    }
    let bound = lp_mean_bound(kd, p);
    let params = [("K", kd), ("p", p)];
    match src {
        Source::Radial(map) => {
            require_identity_radial(map)?;
            let area = map.domain.area();
            let i = map.integrate(|a, b| (a + b).powf(p), QUAD_TOL);
            let value = i.value / area;
            Ok(QuadratureReport::new(
                "lp_mean",
                &params,
                value,
                bound,
                quad_error(&i, bound) / area,
                label_radial(map),
            ))
        }
        Source::Grid(g) => {
            g.require_identity_boundary()?;
            let (v, e) = g.estimate(|s| disk_sum(s, &|d, _| d.opnorm().powf(p)));
            Ok(QuadratureReport::new(
                "lp_mean",
                &params,
                v / PI,
                bound,
                e / PI,
                g.label(),
            ))
        }
    }
}

/// Both readings of the log-Jacobian inequality for a compressing radial map.
#[derive(Clone, Debug)]
pub struct LogInvReport {
    /// `2∫(log|Dh| − log J) ≤ ∫(K − J)`.
    pub report: QuadratureReport,
    /// `2∫log|Dh| − ∫log J`.
    pub ungrouped_value: f64,
}

/// `2∫_B (log|Dh| − log J) ≤ ∫_B (K(z,h) − J)` over the profile's disk.
pub fn check_loginv(profile: &RadialProfile) -> Result<LogInvReport> {
    let big_r = profile.outer_radius();
    if (profile.outer_value() - big_r).abs() > 1e-12 * big_r {
        return Err(Error::Class("map is not the identity on the boundary".into()));
    }
    let cls = classify_profile(profile, 0.0, f64::INFINITY);
    if !cls.compressing {
        return Err(Error::Class("log-Jacobian check needs a compressing profile".into()));
    }
    let lhs = profile_integral(profile, |a, b| 2.0 * ((a + b).ln() - (a * a - b * b).ln()), QUAD_TOL);
    let rhs = profile_integral(profile, |a, b| (a + b) / (a - b) - (a * a - b * b), QUAD_TOL);
    let alt = profile_integral(profile, |a, b| 2.0 * (a + b).ln() - (a * a - b * b).ln(), QUAD_TOL);
    let kd = cls.slope_max.max(1.0 / cls.slope_min);
    let err = quad_error(&lhs, rhs.value) + quad_error(&rhs, rhs.value);
    Ok(LogInvReport {
        report: QuadratureReport::new("loginv", &[("K", kd)], lhs.value, rhs.value, err, "radial quadrature"),
        ungrouped_value: alt.value,
    })
}
