//! Log-concavity bounds for analytic non-vanishing families of functions,
//! in half-plane and disk form, with the support-line diagnostics of the
//! proof and the counterexample for vanishing families.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::adaptive;
use crate::report::{QuadratureReport, Verdict};
use crate::solver::{phi_field_with, sigma_weight, BeltramiCoefficient};
use crate::spectral::Spectral;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Parameter domain of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `Re λ > 0`, interpolating along `θ ∈ (0, 1)`.
    HalfPlane,
    /// `|λ| < 1`, interpolating on circles `|λ| = r`.
    Disk,
}

/// Interpolated exponent; `f64::INFINITY` stands for `∞`.
///
/// Half-plane: `1/p = (1−θ)/p₀ + θ/p₁`. Disk: `1/p = ((1−r)/(1+r))/p₀ + (2r/(1+r))/p₁`.
pub fn p_interp(p0: f64, p1: f64, t: f64, form: Form) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("interpolation parameter {t} outside [0, 1]"));
    }
    if !(p0 > 0.0 && p1 > 0.0) {
        return domain("exponents must be positive");
    }
    let (w0, w1) = match form {
        Form::HalfPlane => (1.0 - t, t),
        Form::Disk => ((1.0 - t) / (1.0 + t), 2.0 * t / (1.0 + t)),
    };
    if w0 == 1.0 {
        return Ok(p0);
    }
    if w1 == 1.0 {
        return Ok(p1);
    }
    let inv = w0 / p0 + w1 / p1;
    Ok(if inv == 0.0 { f64::INFINITY } else { 1.0 / inv })
}

/// `M₀^{w₀} M₁^{w₁}` with the weights of the chosen form.
pub fn interpolation_bound(m0: f64, m1: f64, t: f64, form: Form) -> f64 {
    let (w0, w1) = match form {
        Form::HalfPlane => (1.0 - t, t),
        Form::Disk => ((1.0 - t) / (1.0 + t), 2.0 * t / (1.0 + t)),
    };
    let pow = |m: f64, w: f64| if w == 0.0 { 1.0 } else { m.powf(w) };
    pow(m0, w0) * pow(m1, w1)
}

/// `λ ↦ (1 − λ)/(1 + λ)`, exchanging the unit disk and the right half-plane.
pub fn mobius(lambda: Complex64) -> Complex64 {
    (ONE - lambda) / (ONE + lambda)
}

#[derive(Clone)]
enum Kind {
    Constant(Complex64),
    /// `e^{λ h}`.
    Exponential(Vec<f64>),
    /// `((1−λ)/(1+λ)) g`.
    Vanishing(Vec<f64>),
    /// `g^{1−λ}` for positive `g`.
    Companion(Vec<f64>),
    Beltrami(Arc<BeltramiFamily>),
    Mobius(Box<AnalyticFamily>),
    Restricted(Box<AnalyticFamily>, Vec<usize>),
}

struct BeltramiFamily {
    mu: BeltramiCoefficient,
    p: f64,
    tol: f64,
    spectral: Spectral,
    cells: Vec<usize>,
}

/// Analytic family `λ ↦ Φ_λ` on a weighted finite sample space.
#[derive(Clone)]
pub struct AnalyticFamily {
    kind: Kind,
    weights: Vec<f64>,
    form: Form,
    nonvanishing: bool,
    growth: f64,
    name: String,
}

impl std::fmt::Debug for AnalyticFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AnalyticFamily({}, {:?}, {} samples)",
            self.name,
            self.form,
            self.weights.len()
        )
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidFamily("weights must be finite and nonnegative".into()));
    }
    Ok(())
}

impl AnalyticFamily {
    /// `Φ_λ ≡ c` on the given weights.
    pub fn constant(c: Complex64, weights: Vec<f64>, form: Form) -> Result<Self> {
        check_weights(&weights)?;
        Ok(AnalyticFamily {
            kind: Kind::Constant(c),
            weights,
            form,
            nonvanishing: c != Complex64::new(0.0, 0.0),
            growth: 0.0,
            name: "constant".into(),
        })
    }

    /// `Φ_λ = e^{λh}` with real samples `h`; half-plane form with growth
    /// `a = max h`.
    pub fn exponential(h: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        if h.len() != weights.len() {
            return Err(Error::InvalidFamily("samples and weights differ in length".into()));
        }
        let a = h.iter().cloned().fold(0.0, f64::max);
        Ok(AnalyticFamily {
            kind: Kind::Exponential(h),
            weights,
            form: Form::HalfPlane,
            nonvanishing: true,
            growth: a,
            name: "exponential".into(),
        })
    }

    /// Two atoms of mass ½ with `Φ_λ = (e^λ, e^{−λ})`, growth `a = 1`.
    pub fn two_point() -> Self {
        let mut f = AnalyticFamily::exponential(vec![1.0, -1.0], vec![0.5, 0.5]).unwrap();
        f.name = "two_point".into();
        f
    }

    /// `((1−λ)/(1+λ)) g`, which vanishes identically at `λ = 1`.
    pub fn vanishing(g: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        Ok(AnalyticFamily {
            kind: Kind::Vanishing(g),
            weights,
            form: Form::HalfPlane,
            nonvanishing: false,
            growth: 0.0,
            name: "counterexample".into(),
        })
    }

    /// `g^{1−λ}` for `g > 0`.
    pub fn companion(g: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        if g.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidFamily("companion family needs positive samples".into()));
        }
        Ok(AnalyticFamily {
            kind: Kind::Companion(g),
            weights,
            form: Form::HalfPlane,
            nonvanishing: true,
            growth: 0.0,
            name: "companion".into(),
        })
    }

    /// `Φ_λ = F^λ_z (1 + τ_λ)` of the deformation family of `μ` on the unit
    /// disk cells, with `dσ = (1/π)(1 − p|μ|/(1+|μ|)) dz`.
    pub fn beltrami(mu: BeltramiCoefficient, p: f64, tol: f64) -> Result<Self> {
        let spec = mu.spec();
        let cells = spec.disk_cells(Complex64::new(0.0, 0.0), 1.0);
        let weights: Vec<f64> = cells
            .iter()
            .map(|(i, a)| a * sigma_weight(mu.field().values()[*i].norm(), p) / PI)
            .collect();
        check_weights(&weights)?;
        Ok(AnalyticFamily {
            kind: Kind::Beltrami(Arc::new(BeltramiFamily {
                spectral: Spectral::new(spec),
                cells: cells.into_iter().map(|c| c.0).collect(),
                mu,
                p,
                tol,
            })),
            weights,
            form: Form::Disk,
            nonvanishing: true,
            growth: 0.0,
            name: "beltrami".into(),
        })
    }

    /// The same family in the other parameter domain, `Ψ_λ = Φ_{(1−λ)/(1+λ)}`.
    pub fn mobius(&self) -> Self {
        AnalyticFamily {
            kind: Kind::Mobius(Box::new(self.clone())),
            weights: self.weights.clone(),
            form: match self.form {
                Form::Disk => Form::HalfPlane,
                Form::HalfPlane => Form::Disk,
            },
            nonvanishing: self.nonvanishing,
            growth: 0.0,
            name: format!("{} (mobius)", self.name),
        }
    }

    /// Restriction to the listed sample points.
    pub fn restrict(&self, keep: Vec<usize>) -> Result<Self> {
        if keep.iter().any(|&i| i >= self.len()) {
            return Err(Error::InvalidFamily("restriction index out of range".into()));
        }
        Ok(AnalyticFamily {
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
            kind: Kind::Restricted(Box::new(self.clone()), keep),
            form: self.form,
            nonvanishing: self.nonvanishing,
            growth: self.growth,
            name: format!("{} (restricted)", self.name),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn nonvanishing(&self) -> bool {
        self.nonvanishing
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn raw(&self, lambda: Complex64) -> Result<Vec<Complex64>> {
        Ok(match &self.kind {
            Kind::Constant(c) => vec![*c; self.len()],
            Kind::Exponential(h) => h.iter().map(|x| (lambda * x).exp()).collect(),
            Kind::Vanishing(g) => {
                let c = mobius(lambda);
                g.iter().map(|x| c * x).collect()
            }
            Kind::Companion(g) => g
                .iter()
                .map(|x| (Complex64::new(x.ln(), 0.0) * (ONE - lambda)).exp())
                .collect(),
            Kind::Beltrami(b) => {
                let (phi, _) = phi_field_with(&b.spectral, &b.mu, b.p, lambda, b.tol)?;
                b.cells.iter().map(|&i| phi.values()[i]).collect()
            }
            Kind::Mobius(inner) => inner.raw(mobius(lambda))?,
            Kind::Restricted(inner, keep) => {
                let v = inner.raw(lambda)?;
                keep.iter().map(|&i| v[i]).collect()
            }
        })
    }

    /// Samples of `Φ_λ`; non-finite values and zeros of families declared
    /// non-vanishing raise `InvalidFamily`.
    pub fn values(&self, lambda: Complex64) -> Result<Vec<Complex64>> {
        match self.form {
            Form::HalfPlane if !(lambda.re >= 0.0) => {
                return domain(format!("lambda = {lambda} outside the closed half-plane"))
            }
            Form::Disk if !(lambda.norm() < 1.0) => return domain(format!("lambda = {lambda} outside the unit disk")),
            _ => {}
        }
        let v = self.raw(lambda)?;
        if v.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(Error::InvalidFamily(format!("non-finite value at lambda = {lambda}")));
        }
        if self.nonvanishing && v.iter().zip(&self.weights).any(|(x, w)| *w > 0.0 && x.norm() == 0.0) {
            return Err(Error::InvalidFamily(format!("family vanishes at lambda = {lambda}")));
        }
        Ok(v)
    }

    /// `‖Φ_λ‖_p` with respect to the sample weights; `p = ∞` is the largest
    /// modulus over points of positive weight.
    pub fn norm(&self, lambda: Complex64, p: f64) -> Result<f64> {
        Ok(lp_norm(&self.values(lambda)?, &self.weights, p))
    }
}

fn lp_norm(v: &[Complex64], w: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter()
            .zip(w)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, _)| x.norm())
            .fold(0.0, f64::max)
    } else {
        let s: f64 = v.iter().zip(w).map(|(x, w)| w * x.norm().powf(p)).sum();
        s.powf(1.0 / p)
    }
}

/// `‖Φ_λ‖_p` for each `λ`.
pub fn family_norms(fam: &AnalyticFamily, p: f64, lambdas: &[Complex64]) -> Result<Vec<f64>> {
    if !(p > 0.0) {
        return domain(format!("exponent {p} must be positive"));
    }
    lambdas.iter().map(|l| fam.norm(*l, p)).collect()
}

/// Where the suprema defining `M₀` (half-plane) or `M₁` and `M_r` (disk) are
/// sampled: `points` values per circle or vertical segment at each level,
/// doubled until the sup moves by less than `rel` or `max_points` is reached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSampling {
    pub points: usize,
    pub max_points: usize,
    pub rel: f64,
    /// Radii (disk) or abscissae `Re λ` (half-plane).
    pub levels: Vec<f64>,
    /// Half-length of the sampled segments `|Im λ| ≤ extent` (half-plane).
    pub extent: f64,
}

impl LambdaSampling {
    pub fn disk() -> Self {
        LambdaSampling {
            points: 64,
            max_points: 256,
            rel: 0.01,
            levels: vec![0.3, 0.6, 0.8, 0.9],
            extent: 0.0,
        }
    }

    pub fn half_plane() -> Self {
        LambdaSampling {
            points: 64,
            max_points: 256,
            rel: 0.01,
            levels: vec![0.0, 0.5, 1.0, 2.0],
            extent: 8.0,
        }
    }

    fn describe(&self, form: Form) -> String {
        match form {
            Form::Disk => format!("{} pts per circle at radii {:?}", self.points, self.levels),
            Form::HalfPlane => format!(
                "{} pts on |Im| <= {} at Re in {:?}",
                self.points, self.extent, self.levels
            ),
        }
    }
}

fn level_points(level: f64, n: usize, form: Form, extent: f64) -> Vec<Complex64> {
    match form {
        Form::Disk => (0..n)
            .map(|j| Complex64::from_polar(level, 2.0 * PI * j as f64 / n as f64))
            .collect(),
        Form::HalfPlane => (0..n)
            .map(|j| Complex64::new(level, -extent + 2.0 * extent * (j as f64 + 0.5) / n as f64))
            .collect(),
    }
}

/// Sup of `f` over one sampled level, refined by doubling.
fn level_sup(
    f: &dyn Fn(Complex64) -> Result<f64>,
    level: f64,
    form: Form,
    s: &LambdaSampling,
) -> Result<(f64, Complex64)> {
    let mut best = (f64::NEG_INFINITY, Complex64::new(level, 0.0));
    let mut n = s.points;
    let mut prev = f64::NEG_INFINITY;
    loop {
        for l in level_points(level, n, form, s.extent) {
            let v = f(l)?;
            if v > best.0 {
                best = (v, l);
            }
        }
        if (best.0 - prev).abs() <= s.rel * best.0.abs() || n >= s.max_points {
            return Ok(best);
        }
        prev = best.0;
        n *= 2;
    }
}

/// Outcome of a log-concavity check.
#[derive(Clone, Debug, Serialize)]
pub struct InterpolationReport {
    pub family: String,
    pub form: Form,
    pub p0: f64,
    pub p1: f64,
    pub m0: f64,
    pub m1: f64,
    pub t: Vec<f64>,
    pub p_t: Vec<f64>,
    pub m_t: Vec<f64>,
    pub bounds: Vec<f64>,
    pub margins: Vec<f64>,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub sampling: String,
    pub verdict: Verdict,
}

impl InterpolationReport {
    /// One row per interpolation parameter in the shared report schema.
    pub fn rows(&self) -> Vec<QuadratureReport> {
        (0..self.t.len())
            .map(|i| {
                QuadratureReport::new(
                    &format!("interpolation_{}", self.family),
                    &[("t", self.t[i]), ("p_t", self.p_t[i]), ("p0", self.p0), ("p1", self.p1)],
                    self.m_t[i],
                    self.bounds[i],
                    self.tolerance,
                    self.sampling.clone(),
                )
            })
            .collect()
    }
}

fn sup_over_levels(f: &dyn Fn(Complex64) -> Result<f64>, form: Form, s: &LambdaSampling) -> Result<f64> {
    let mut m = f64::NEG_INFINITY;
    for &lv in &s.levels {
        m = m.max(level_sup(f, lv, form, s)?.0);
    }
    Ok(m)
}

/// Compares `M_t` with `M₀^{w₀}M₁^{w₁}` for each `t` in `ts`.
pub fn check_interpolation_bound(
    fam: &AnalyticFamily,
    p0: f64,
    p1: f64,
    ts: &[f64],
    sampling: &LambdaSampling,
    tolerance: f64,
) -> Result<InterpolationReport> {
    let form = fam.form();
    let a = fam.growth();
    let (m0, m1) = match form {
        Form::HalfPlane => (
            sup_over_levels(&|l| Ok((-a * l.re).exp() * fam.norm(l, p0)?), form, sampling)?,
            fam.norm(ONE, p1)?,
        ),
        Form::Disk => (
            fam.norm(Complex64::new(0.0, 0.0), p0)?,
            sup_over_levels(&|l| fam.norm(l, p1), form, sampling)?,
        ),
    };
    let mut p_t = Vec::new();
    let mut m_t = Vec::new();
    let mut bounds = Vec::new();
    for &t in ts {
        let pt = p_interp(p0, p1, t, form)?;
        let m = match form {
            Form::HalfPlane => fam.norm(Complex64::new(t, 0.0), pt)?,
            Form::Disk if t == 0.0 => fam.norm(Complex64::new(0.0, 0.0), pt)?,
            Form::Disk => {
                let s = LambdaSampling {
                    levels: vec![t],
                    ..sampling.clone()
                };
                sup_over_levels(&|l| fam.norm(l, pt), form, &s)?
            }
        };
        p_t.push(pt);
        m_t.push(m);
        bounds.push(interpolation_bound(m0, m1, t, form));
    }
    let margins: Vec<f64> = bounds.iter().zip(&m_t).map(|(b, m)| b - m).collect();
    let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(InterpolationReport {
        family: fam.name().to_string(),
        form,
        p0,
        p1,
        m0,
        m1,
        t: ts.to_vec(),
        p_t,
        m_t,
        bounds,
        margins,
        worst_margin: worst,
        tolerance,
        sampling: sampling.describe(form),
        verdict: if worst >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    })
}

/// Disk-form check of the deformation family of `μ` with `p₀ = ∞`, `p₁ = 2`
/// at grid `spec`, with tolerance `0.01·bound + 2|margin(N) − margin(N/2)|`.
pub fn check_beltrami_interpolation(
    build: &dyn Fn(GridSpec) -> Result<BeltramiCoefficient>,
    spec: GridSpec,
    p: f64,
    rs: &[f64],
    sampling: &LambdaSampling,
    tol: f64,
) -> Result<InterpolationReport> {
    let fine = AnalyticFamily::beltrami(build(spec)?, p, tol)?;
    let coarse = AnalyticFamily::beltrami(build(GridSpec::new(spec.n() / 2, spec.half_side())?)?, p, tol)?;
    let a = check_interpolation_bound(&fine, f64::INFINITY, 2.0, rs, sampling, 0.0)?;
    let b = check_interpolation_bound(&coarse, f64::INFINITY, 2.0, rs, sampling, 0.0)?;
    let drift = a
        .margins
        .iter()
        .zip(&b.margins)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let bound = a.bounds.iter().cloned().fold(0.0, f64::max);
    let tolerance = 0.01 * bound + 2.0 * drift;
    Ok(InterpolationReport {
        verdict: if a.worst_margin >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        tolerance,
        sampling: format!("{}; grid N={} L={}", a.sampling, spec.n(), spec.half_side()),
        ..a
    })
}

/// Support-line construction of the proof for a half-plane family.
#[derive(Clone, Debug, Serialize)]
pub struct SupportLineDiag {
    pub theta: f64,
    pub p_theta: f64,
    /// Normalization `M₀` used to make `u_{p₀} ≤ 0`.
    pub m0: f64,
    pub density: Vec<f64>,
    /// `∫℘ dσ`.
    pub mass: f64,
    /// Slope `I = ∫℘ log(1/℘) dσ`.
    pub slope: f64,
    #[serde(skip)]
    pub lambdas: Vec<Complex64>,
    /// `u_∞(λ) = ∫℘ log|Ψ_λ| dσ` at the sampled `λ`.
    pub u_inf: Vec<f64>,
    /// `max (u_p(λ) − log‖Ψ_λ‖_p)` over sampled `λ` and `p`.
    pub envelope_worst: f64,
    /// `|u_{p_θ}(θ) − log‖Ψ_θ‖_{p_θ}|`.
    pub equality_gap: f64,
    /// Whether `u_{p₀} ≤ 0` held on every sampled `λ`.
    pub harnack_applicable: bool,
    /// `u_{p₀}(θ) − θ u_{p₀}(1)`.
    pub harnack_gap: f64,
}

impl SupportLineDiag {
    pub fn passes(&self) -> bool {
        (self.mass - 1.0).abs() <= 1e-10
            && self.equality_gap <= 1e-9
            && self.envelope_worst <= 1e-10
            && (!self.harnack_applicable || self.harnack_gap <= 1e-10)
    }
}

/// Builds the density `℘ ∝ |Ψ_θ|^{p_θ}` for the normalized family
/// `Ψ_λ = e^{−aλ}Φ_λ/M₀` and evaluates the envelope, its equality case and
/// the Harnack step on the sampled half-plane grid.
pub fn support_line(
    fam: &AnalyticFamily,
    theta: f64,
    p0: f64,
    p1: f64,
    sampling: &LambdaSampling,
) -> Result<SupportLineDiag> {
    if fam.form() != Form::HalfPlane {
        return domain("support lines are built for half-plane families");
    }
    if !(theta > 0.0 && theta < 1.0) {
        return domain("theta must lie in (0, 1)");
    }
    if !(p0.is_finite() && p1.is_finite()) {
        return domain("support lines need finite exponents");
    }
    let a = fam.growth();
    let psi = |l: Complex64| -> Result<Vec<Complex64>> {
        let v = fam.values(l)?;
        if v.iter().zip(fam.weights()).any(|(x, w)| *w > 0.0 && x.norm() == 0.0) {
            return domain(format!("family vanishes at lambda = {l}"));
        }
        let g = (-a * l).exp();
        Ok(v.into_iter().map(|x| x * g).collect())
    };
    let w = fam.weights();
    let m0 = sup_over_levels(&|l| Ok(lp_norm(&psi(l)?, w, p0)), Form::HalfPlane, sampling)?;
    if !(m0.is_finite() && m0 > 0.0) {
        return domain(format!("normalization M0 = {m0} is not finite and positive"));
    }
    let pt = p_interp(p0, p1, theta, Form::HalfPlane)?;
    let th = Complex64::new(theta, 0.0);
    let norm_at = |l: Complex64| -> Result<Vec<Complex64>> { Ok(psi(l)?.into_iter().map(|x| x / m0).collect()) };
    let v_th = norm_at(th)?;
    let z: f64 = v_th.iter().zip(w).map(|(x, w)| w * x.norm().powf(pt)).sum();
    let density: Vec<f64> = v_th.iter().map(|x| x.norm().powf(pt) / z).collect();
    let mass: f64 = density.iter().zip(w).map(|(d, w)| d * w).sum();
    let slope: f64 = density
        .iter()
        .zip(w)
        .filter(|(d, w)| **d > 0.0 && **w > 0.0)
        .map(|(d, w)| -w * d * d.ln())
        .sum();
    let u_inf_of = |v: &[Complex64]| -> f64 {
        v.iter()
            .zip(w)
            .zip(&density)
            .filter(|((_, w), _)| **w > 0.0)
            .map(|((x, w), d)| w * d * x.norm().ln())
            .sum()
    };
    let u = |p: f64, ui: f64| if p.is_infinite() { ui } else { slope / p + ui };

    let equality_gap = (u(pt, u_inf_of(&v_th)) - lp_norm(&v_th, w, pt).ln()).abs();

    let exps = [p0, p1, pt, 0.5 * pt, 2.0 * pt, f64::INFINITY];
    let mut lambdas = vec![th, ONE];
    for &lv in &sampling.levels {
        lambdas.extend(level_points(lv, 16, Form::HalfPlane, sampling.extent));
    }
    let mut u_inf = Vec::with_capacity(lambdas.len());
    let mut envelope_worst = f64::NEG_INFINITY;
    let mut harnack_applicable = true;
    for &l in &lambdas {
        let v = norm_at(l)?;
        let ui = u_inf_of(&v);
        for &p in &exps {
            envelope_worst = envelope_worst.max(u(p, ui) - lp_norm(&v, w, p).ln());
        }
        if u(p0, ui) > 1e-12 {
            harnack_applicable = false;
        }
        u_inf.push(ui);
    }
    let harnack_gap = u(p0, u_inf[0]) - theta * u(p0, u_inf[1]);
    Ok(SupportLineDiag {
        theta,
        p_theta: pt,
        m0,
        density,
        mass,
        slope,
        lambdas,
        u_inf,
        envelope_worst,
        equality_gap,
        harnack_applicable,
        harnack_gap,
    })
}

/// Demonstration that the bound fails without non-vanishing.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub theta: f64,
    pub p_theta: f64,
    /// `M₀ = ‖g‖₁` (the sup of `|(1−λ)/(1+λ)|` over the half-plane is 1).
    pub m0: f64,
    /// `‖Φ₁‖_∞ = 0`.
    pub m1: f64,
    /// `(δ, ‖Φ_θ χ_{(δ, ½)}‖_{p_θ})` for the vanishing family.
    pub truncations: Vec<(f64, f64)>,
    /// Ratio of the last to the first truncated norm.
    pub growth: f64,
    /// `(δ, M_θ, bound)` for the non-vanishing companion `g^{1−λ}`.
    pub companion: Vec<(f64, f64, f64)>,
    pub verdict: Verdict,
}

/// `g(x) = 1/(x log²x)` on `(0, ½)`: integrable, in no `L^p` with `p > 1`.
pub fn default_counterexample_g(x: f64) -> f64 {
    let l = x.ln();
    1.0 / (x * l * l)
}

/// `∫_δ^{1/2} g(x)^q dx`, computed in the variable `u = log x`.
fn truncated_power(g: &dyn Fn(f64) -> f64, delta: f64, q: f64) -> f64 {
    let lo = delta.ln();
    let hi = 0.5f64.ln();
    let mut f = |u: f64| {
        let x = u.exp();
        g(x).powf(q) * x
    };
    // Split so each panel covers a moderate range of scales.
    let parts = ((hi - lo) / 2.0).ceil().max(1.0) as usize;
    (0..parts)
        .map(|i| {
            let a = lo + (hi - lo) * i as f64 / parts as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / parts as f64;
            adaptive(&mut f, a, b, 1e-12).value
        })
        .sum()
}

/// `∫_0^{1/2} g(x) dx` in the variable `s = −1/log x`, where the
/// logarithmic singularity becomes a bounded integrand.
fn full_integral(g: &dyn Fn(f64) -> f64) -> f64 {
    let mut f = |s: f64| {
        let x = (-1.0 / s).exp();
        if x == 0.0 {
            return 0.0;
        }
        g(x) * x / (s * s)
    };
    adaptive(&mut f, 0.0, 1.0 / 2f64.ln(), 1e-13).value
}

/// Runs the vanishing family `((1−λ)/(1+λ))g` with `p₀ = 1`, `p₁ = ∞` at
/// parameter `θ` under the truncations `δ`, and the companion `g^{1−λ}`.
pub fn counterexample_demo(g: &dyn Fn(f64) -> f64, theta: f64, deltas: &[f64]) -> Result<CounterexampleReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return domain("theta must lie in (0, 1)");
    }
    let pt = p_interp(1.0, f64::INFINITY, theta, Form::HalfPlane)?;
    let c = mobius(Complex64::new(theta, 0.0)).norm();
    let m0 = full_integral(g);
    let truncations: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&d| (d, c * truncated_power(g, d, pt).powf(1.0 / pt)))
        .collect();
    let growth = truncations.last().map(|l| l.1).unwrap_or(0.0) / truncations.first().map(|f| f.1).unwrap_or(1.0);
    // g^{1−θ} in L^{p_θ}: ∫ g^{(1−θ)p_θ} = ∫ g, and M₁ = ‖1‖_∞ = 1.
    let companion = deltas
        .iter()
        .map(|&d| {
            let m0d = truncated_power(g, d, 1.0);
            let mt = truncated_power(g, d, (1.0 - theta) * pt).powf(1.0 / pt);
            (d, mt, interpolation_bound(m0d, 1.0, theta, Form::HalfPlane))
        })
        .collect();
    Ok(CounterexampleReport {
        theta,
        p_theta: pt,
        m0,
        m1: 0.0,
        truncations,
        growth,
        companion,
        verdict: Verdict::Demonstrated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn probability(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn exponents() {
        assert_eq!(p_interp(f64::INFINITY, 2.0, 0.5, Form::HalfPlane).unwrap(), 4.0);
        for r in [0.1, 0.25, 0.5, 0.9] {
            let p = p_interp(f64::INFINITY, 2.0, r, Form::Disk).unwrap();
            assert!((p - (1.0 + r) / r).abs() < 1e-12);
        }
        assert_eq!(p_interp(3.0, 7.0, 0.0, Form::HalfPlane).unwrap(), 3.0);
        assert_eq!(p_interp(3.0, 7.0, 1.0, Form::HalfPlane).unwrap(), 7.0);
        assert_eq!(p_interp(f64::INFINITY, 2.0, 0.0, Form::Disk).unwrap(), f64::INFINITY);
        assert!(p_interp(1.0, 2.0, 1.5, Form::Disk).is_err());
    }

    #[test]
    fn mobius_consistency() {
        for i in 0..=50 {
            let r = i as f64 / 50.0;
            let th = mobius(Complex64::new(r, 0.0)).re;
            for (p0, p1) in [(f64::INFINITY, 2.0), (1.5, 4.0), (2.0, 2.0)] {
                let a = p_interp(p0, p1, r, Form::Disk).unwrap();
                let b = p_interp(p1, p0, th, Form::HalfPlane).unwrap();
                assert!(a == b || ((a - b) / a).abs() < 1e-10, "{r} {a} {b}");
                let ba = interpolation_bound(1.3, 0.7, r, Form::Disk);
                let bb = interpolation_bound(0.7, 1.3, th, Form::HalfPlane);
                assert!((ba - bb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_family_equality() {
        let c = Complex64::new(0.6, 0.8);
        for form in [Form::HalfPlane, Form::Disk] {
            let f = AnalyticFamily::constant(c, probability(7), form).unwrap();
            let samp = match form {
                Form::Disk => LambdaSampling::disk(),
                Form::HalfPlane => LambdaSampling::half_plane(),
            };
            let r = check_interpolation_bound(&f, 1.5, 4.0, &[0.1, 0.5, 0.9], &samp, 1e-12).unwrap();
            assert!(r.margins.iter().all(|m| m.abs() < 1e-12), "{r:?}");
            assert_eq!(r.verdict, Verdict::Pass);
            for p in [0.5, 2.0, f64::INFINITY] {
                assert!((f.norm(Complex64::new(0.3, 0.1), p).unwrap() - 1.0).abs() < 1e-15);
            }
        }
        let d = support_line(
            &AnalyticFamily::constant(c, probability(5), Form::HalfPlane).unwrap(),
            0.4,
            2.0,
            6.0,
            &LambdaSampling::half_plane(),
        )
        .unwrap();
        assert!(d.passes(), "{d:?}");
        assert!(d.density.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn exponential_family_norms_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.5)).collect();
        let w = probability(40);
        let f = AnalyticFamily::exponential(h.clone(), w.clone()).unwrap();
        // Direct oracle: ‖e^{λh}‖_p^p = Σ w e^{p Re λ h}.
        let l = Complex64::new(0.7, -2.0);
        for p in [1.0, 2.5] {
            let direct: f64 = h
                .iter()
                .zip(&w)
                .map(|(x, w)| w * (p * 0.7 * x).exp())
                .sum::<f64>()
                .powf(1.0 / p);
            assert!((f.norm(l, p).unwrap() - direct).abs() < 1e-10 * direct);
        }
        let ts: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let r = check_interpolation_bound(&f, 1.0, 3.0, &ts, &LambdaSampling::half_plane(), 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn two_point_support_line() {
        let f = AnalyticFamily::two_point();
        for theta in [0.2, 0.5, 0.8] {
            let d = support_line(&f, theta, 2.0, 5.0, &LambdaSampling::half_plane()).unwrap();
            assert!(d.passes(), "{d:?}");
            assert!(d.harnack_applicable);
            // Closed form: e^{−x}‖(e^{x}, e^{−x})‖₂ = ((1 + e^{−4x})/2)^{1/2}, largest at x = 0.
            assert!((d.m0 - 1.0).abs() < 1e-15);
            let pt = d.p_theta;
            let a = (-2.0 * theta * pt).exp();
            let expect = [1.0 / (0.5 * (1.0 + a)), a / (0.5 * (1.0 + a))];
            assert!((d.density[0] - expect[0]).abs() < 1e-12 && (d.density[1] - expect[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishing_family_is_flagged() {
        let f = AnalyticFamily::vanishing(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(f.norm(ONE, f64::INFINITY).unwrap(), 0.0);
        let mut g = f.clone();
        g.nonvanishing = true;
        assert!(matches!(g.values(ONE), Err(Error::InvalidFamily(_))));
    }

    #[test]
    fn counterexample_growth() {
        let deltas = [1e-2, 1e-4, 1e-6, 1e-8];
        let r = counterexample_demo(&default_counterexample_g, 0.5, &deltas).unwrap();
        assert_eq!(r.p_theta, 2.0);
        assert!((r.m0 - 1.0 / 2f64.ln()).abs() < 1e-8, "{}", r.m0);
        assert!(r.truncations.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(r.growth >= 10.0, "{r:?}");
        for (_, m, b) in &r.companion {
            assert!((m - b).abs() < 1e-9 * b);
        }
        // The sampled companion family, as an AnalyticFamily, passes the bound.
        let xs: Vec<f64> = (0..200).map(|i| 0.5 * (i as f64 + 0.5) / 200.0).collect();
        let g: Vec<f64> = xs.iter().map(|x| default_counterexample_g(*x)).collect();
        let f = AnalyticFamily::companion(g, vec![0.5 / 200.0; 200]).unwrap();
        let rep = check_interpolation_bound(
            &f,
            1.0,
            f64::INFINITY,
            &[0.25, 0.5, 0.75],
            &LambdaSampling::half_plane(),
            1e-10,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    }

    #[test]
    fn beltrami_family() {
        let spec = GridSpec::new(64, 2.0).unwrap();
        let build = |s: GridSpec| {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            BeltramiCoefficient::random_smooth(s, &mut rng, 0.3)
        };
        let f = AnalyticFamily::beltrami(build(spec).unwrap(), 3.0, 1e-10).unwrap();
        let mass: f64 = f.weights().iter().sum();
        for p in [1.0, 2.0, 4.0] {
            let n = f.norm(Complex64::new(0.0, 0.0), p).unwrap();
            assert!((n - mass.powf(1.0 / p)).abs() < 1e-12);
        }
        assert!((f.norm(Complex64::new(0.0, 0.0), f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        let samp = LambdaSampling {
            points: 8,
            max_points: 16,
            levels: vec![0.5, 0.8],
            ..LambdaSampling::disk()
        };
        let r = check_beltrami_interpolation(
            &build,
            GridSpec::new(128, 2.0).unwrap(),
            3.0,
            &[0.25, 0.5],
            &samp,
            1e-10,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.m1 <= 1.0 + r.tolerance);

        // Support line on the cells where |Φ| stays in [1/2, 2] for the sampled λ.
        let h = f.mobius();
        let probe = [0.2, 0.5, 1.0, 3.0];
        let mut keep: Vec<usize> = (0..h.len()).collect();
        for x in probe {
            let v = h.values(Complex64::new(x, 0.0)).unwrap();
            keep.retain(|&i| (0.5..=2.0).contains(&v[i].norm()));
        }
        let sub = h.restrict(keep).unwrap();
        let s = LambdaSampling {
            points: 4,
            max_points: 4,
            levels: vec![0.2, 1.0],
            extent: 1.0,
            ..LambdaSampling::half_plane()
        };
        let d = support_line(&sub, 0.5, 2.0, 8.0, &s).unwrap();
        assert!(
            (d.mass - 1.0).abs() < 1e-10 && d.equality_gap < 1e-9 && d.envelope_worst < 1e-10,
            "{d:?}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn norms_increase_with_p(h in prop::collection::vec(-2.0f64..2.0, 1..30), x in 0.0f64..2.0, y in -3.0f64..3.0) {
            let n = h.len();
            let f = AnalyticFamily::exponential(h, probability(n)).unwrap();
            let l = Complex64::new(x, y);
            let ps = [0.5, 1.0, 2.0, 3.0, 8.0, f64::INFINITY];
            let v = family_norms(&f, 1.0, &[l]).unwrap();
            prop_assert!(v[0].is_finite());
            for w in ps.windows(2) {
                let a = f.norm(l, w[0]).unwrap();
                let b = f.norm(l, w[1]).unwrap();
                prop_assert!(a <= b * (1.0 + 1e-12));
            }
        }

        #[test]
        fn envelope_on_random_exponential_families(h in prop::collection::vec(-1.0f64..1.0, 2..12), theta in 0.05f64..0.95) {
            let n = h.len();
            let f = AnalyticFamily::exponential(h, probability(n)).unwrap();
            let s = LambdaSampling { points: 8, max_points: 8, ..LambdaSampling::half_plane() };
            let d = support_line(&f, theta, 1.5, 6.0, &s).unwrap();
            prop_assert!(d.passes(), "{:?}", d);
        }
    }
}
