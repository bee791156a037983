use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::functional::PlanarDeriv;
use crate::quadrature::{adaptive, integrate_to_zero, Integral};

/// Closure returning `(ρ(t), ρ̇(t))` on `(r, R]`.
pub type ProfileFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum ProfileKind {
    /// `ρ(t) = ρ(R) t / R`.
    Identity,
    /// `ρ(t) = ρ(R) (t/R)^s`. The extremal `ρ_K` has `s = 1/K`.
    Power {
        exponent: f64,
    },
    /// Piecewise linear through `(t, ρ)` knots from `r` to `R`.
    Table {
        knots: Vec<(f64, f64)>,
    },
    Custom(ProfileFn),
}

impl fmt::Debug for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Identity => write!(f, "Identity"),
            ProfileKind::Power { exponent } => write!(f, "Power({exponent})"),
            ProfileKind::Table { knots } => write!(f, "Table({} knots)", knots.len()),
            ProfileKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Behaviour of a ratio `ρ(t)/t^β` as `t → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum OriginLimit {
    Zero,
    Finite(f64),
    Infinite,
    /// Not decidable from the profile description.
    Unknown,
}

/// Radial profile `ρ` of the map `g(z) = ρ(|z|) z/|z|` on `|z| ≤ R`, linear on
/// the core `[0, r]`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    r: f64,
    big_r: f64,
    kind: ProfileKind,
    /// `ρ(R)`.
    outer: f64,
}

const REL: f64 = 1e-12;

impl RadialProfile {
    pub fn new(r: f64, big_r: f64, kind: ProfileKind, outer: f64) -> Result<Self> {
        if !(r >= 0.0 && big_r > r && big_r.is_finite() && outer > 0.0 && outer.is_finite()) {
            return invalid(format!(
                "need 0 <= r < R and rho(R) > 0 (r={r}, R={big_r}, rho(R)={outer})"
            ));
        }
        match &kind {
            ProfileKind::Power { exponent } if !(*exponent > 0.0 && exponent.is_finite()) => {
                return invalid(format!("power exponent {exponent} must be positive"));
            }
            ProfileKind::Table { knots } => {
                let first = *knots
                    .first()
                    .ok_or_else(|| crate::Error::InvalidInput("empty table".into()))?;
                let last = *knots.last().unwrap();
                if knots.len() < 2 || (first.0 - r).abs() > REL * big_r || (last.0 - big_r).abs() > REL * big_r {
                    return invalid("table knots must run from r to R");
                }
                if (last.1 - outer).abs() > REL * outer {
                    return invalid("last table value must equal rho(R)");
                }
                if r == 0.0 && first.1 != 0.0 {
                    return invalid("a table starting at the origin must start at rho = 0");
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                        return invalid("table knots must be strictly increasing in t and rho");
                    }
                }
            }
            _ => {}
        }
        Ok(RadialProfile { r, big_r, kind, outer })
    }

    pub fn identity(big_r: f64) -> Self {
        RadialProfile::new(0.0, big_r, ProfileKind::Identity, big_r).unwrap()
    }

    /// The extremal `ρ_K(t) = R^{1-1/K} t^{1/K}` on `(r, R)`, linear on `[0, r]`.
    pub fn power_k(k: f64, r: f64, big_r: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return invalid(format!("distortion K = {k} must be >= 1"));
        }
        RadialProfile::new(r, big_r, ProfileKind::Power { exponent: 1.0 / k }, big_r)
    }

    /// `ρ(t) = R (t/R)^s`; compressing for `s ≥ 1`.
    pub fn power_exponent(s: f64, r: f64, big_r: f64) -> Result<Self> {
        RadialProfile::new(r, big_r, ProfileKind::Power { exponent: s }, big_r)
    }

    pub fn table(r: f64, knots: Vec<(f64, f64)>) -> Result<Self> {
        let last = *knots
            .last()
            .ok_or_else(|| crate::Error::InvalidInput("empty table".into()))?;
        RadialProfile::new(r, last.0, ProfileKind::Table { knots }, last.1)
    }

    pub fn custom(r: f64, big_r: f64, outer: f64, f: ProfileFn) -> Result<Self> {
        RadialProfile::new(r, big_r, ProfileKind::Custom(f), outer)
    }

    pub fn inner(&self) -> f64 {
        self.r
    }

    pub fn outer_radius(&self) -> f64 {
        self.big_r
    }

    pub fn outer_value(&self) -> f64 {
        self.outer
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, ProfileKind::Identity) && (self.outer - self.big_r).abs() <= REL * self.big_r
    }

    /// `(ρ, ρ̇)` on the annular part `t ≥ r`, right derivative at knots.
    fn annular(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Identity => {
                let c = self.outer / self.big_r;
                (c * t, c)
            }
            ProfileKind::Power { exponent } => {
                let rho = self.outer * (t / self.big_r).powf(*exponent);
                (rho, exponent * rho / t)
            }
            ProfileKind::Table { knots } => {
                let i = match knots.iter().rposition(|k| k.0 <= t) {
                    Some(i) if i + 1 < knots.len() => i,
                    Some(_) => knots.len() - 2,
                    None => 0,
                };
                let (t0, r0) = knots[i];
                let (t1, r1) = knots[i + 1];
                let m = (r1 - r0) / (t1 - t0);
                (r0 + m * (t - t0), m)
            }
            ProfileKind::Custom(f) => f(t),
        }
    }

    /// Slope of the linear core, `ρ(r)/r`.
    pub fn core_slope(&self) -> Option<f64> {
        (self.r > 0.0).then(|| self.annular(self.r).0 / self.r)
    }

    /// Interior points of `(r, R)` where `ρ̇` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Table { knots } => knots
                .iter()
                .map(|k| k.0)
                .filter(|&t| t > self.r && t < self.big_r)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// `∫_r^R f` split at the breakpoints; the panel at the origin is
    /// integrated dyadically when there is no core.
    pub fn integrate_annulus(&self, mut f: impl FnMut(f64) -> f64, tol: f64) -> Integral {
        let mut cuts = vec![self.r];
        cuts.extend(self.breakpoints());
        cuts.push(self.big_r);
        let share = tol / (cuts.len() - 1) as f64;
        let mut total = Integral::zero();
        for w in cuts.windows(2) {
            let part = if w[0] > 0.0 {
                adaptive(&mut f, w[0], w[1], share)
            } else {
                integrate_to_zero(&mut f, w[1], share)
            };
            total = total.add(part);
        }
        total
    }

    /// `(ρ(t), ρ̇(t))` for `0 < t ≤ R`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self.core_slope() {
            Some(c) if t < self.r => (c * t, c),
            _ => self.annular(t),
        }
    }

    pub fn rho(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            self.eval(t).0
        }
    }

    /// Logarithmic slope `σ = t ρ̇ / ρ`, whose range decides every profile
    /// condition: expanding means `σ ≤ 1`.
    pub fn log_slope(&self, t: f64) -> f64 {
        let (rho, d) = self.eval(t);
        t * d / rho
    }

    /// Range of `σ` over the annulus `(r, R)`. Exact for closed forms and
    /// tables (one-sided values at knots), sampled for custom profiles.
    pub fn log_slope_range(&self) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Identity => (1.0, 1.0),
            ProfileKind::Power { exponent } => (*exponent, *exponent),
            ProfileKind::Table { knots } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for w in knots.windows(2) {
                    let m = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    for (t, rho) in [w[0], w[1]] {
                        if t > 0.0 {
                            let s = t * m / rho;
                            lo = lo.min(s);
                            hi = hi.max(s);
                        } else {
                            lo = lo.min(1.0);
                            hi = hi.max(1.0);
                        }
                    }
                }
                (lo, hi)
            }
            ProfileKind::Custom(_) => {
                let a = if self.r > 0.0 { self.r } else { self.big_r * 1e-6 };
                let n = 2000;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..=n {
                    let t = a * (self.big_r / a).powf(i as f64 / n as f64);
                    let s = self.log_slope(t);
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
                (lo, hi)
            }
        }
    }

    /// Limit of `ρ(t)/t^β` at the origin.
    pub fn origin_limit(&self, beta: f64) -> OriginLimit {
        let s = match (&self.kind, self.r > 0.0) {
            (_, true) | (ProfileKind::Identity, _) | (ProfileKind::Table { .. }, _) => {
                // Linear near the origin: a core, the identity, or a first
                // table segment through 0.
                let c = match self.core_slope() {
                    Some(c) => c,
                    None => self.eval(self.big_r * 1e-12).1,
                };
                return compare_exponents(1.0, beta, c);
            }
            (ProfileKind::Power { exponent }, false) => *exponent,
            (ProfileKind::Custom(_), false) => return OriginLimit::Unknown,
        };
        compare_exponents(s, beta, self.outer * self.big_r.powf(-s))
    }

    /// Planar derivative of `g(z) = ρ(|z|) z/|z|` at `z ≠ 0`.
    pub fn deriv(&self, z: Complex64) -> Result<PlanarDeriv> {
        radial_deriv(self, z)
    }

    /// Derivative on the linear core, where `g` is conformal.
    pub fn core_deriv(&self) -> Option<PlanarDeriv> {
        self.core_slope()
            .map(|c| PlanarDeriv::conformal(Complex64::new(c, 0.0)))
    }

    /// `g(z)`.
    pub fn map(&self, z: Complex64) -> Complex64 {
        let t = z.norm();
        if t == 0.0 {
            z
        } else {
            z * (self.rho(t) / t)
        }
    }
}

fn compare_exponents(s: f64, beta: f64, coeff: f64) -> OriginLimit {
    if (s - beta).abs() <= 1e-12 {
        OriginLimit::Finite(coeff)
    } else if s > beta {
        OriginLimit::Zero
    } else {
        OriginLimit::Infinite
    }
}

/// `(g_z, g_z̄) = (½(ρ̇ + ρ/t), ½(ρ̇ − ρ/t) z/z̄)` at `t = |z|`.
pub fn radial_deriv(profile: &RadialProfile, z: Complex64) -> Result<PlanarDeriv> {
    let t = z.norm();
    if t == 0.0 {
        return domain("radial derivative is undefined at the origin; use the core derivative");
    }
    if t > profile.big_r * (1.0 + REL) {
        return domain(format!("|z| = {t} lies outside the profile radius {}", profile.big_r));
    }
    let (rho, d) = profile.eval(t.min(profile.big_r));
    let u = z / t;
    Ok(PlanarDeriv::new(
        Complex64::new(0.5 * (d + rho / t), 0.0),
        0.5 * (d - rho / t) * u * u,
    ))
}

/// Which of the profile conditions hold for given `p` and `K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileClassification {
    /// `ρ/t ≥ ρ̇ ≥ 0`.
    pub expanding: bool,
    /// `ρ̇ ≥ ρ/t`.
    pub compressing: bool,
    /// `ρ/t ≥ ρ̇ ≥ (1 − 2/p) ρ/t`.
    pub rho4: bool,
    /// `ρ/t ≥ ρ̇ ≥ ρ/(Kt)` with `K < p/(p − 2)`.
    pub rho3: bool,
    /// `r > 0` or `ρ(t) = o(t^{1−2/p})`.
    pub aa1: bool,
    /// `ρ(t)/t^{1−2/p} → ∞` at the origin; `None` when undecidable.
    pub nonexpanding_limit: Option<bool>,
    pub slope_min: f64,
    pub slope_max: f64,
}

pub fn classify_profile(profile: &RadialProfile, p: f64, k: f64) -> ProfileClassification {
    let tol = 1e-12;
    let (lo, hi) = profile.log_slope_range();
    let expanding = lo >= -tol && hi <= 1.0 + tol;
    let compressing = lo >= 1.0 - tol;
    let beta = 1.0 - 2.0 / p;
    let rho4 = expanding && lo >= beta - tol;
    let k_ok = p <= 2.0 || k < p / (p - 2.0);
    let rho3 = expanding && lo >= 1.0 / k - tol && k_ok;
    let limit = profile.origin_limit(beta);
    let aa1 = profile.r > 0.0
        || match limit {
            OriginLimit::Zero => true,
            OriginLimit::Unknown => sampled_ratio_decays(profile, beta),
            _ => false,
        };
    let nonexpanding_limit = match limit {
        OriginLimit::Unknown => None,
        l => Some(l == OriginLimit::Infinite),
    };
    ProfileClassification {
        expanding,
        compressing,
        rho4,
        rho3,
        aa1,
        nonexpanding_limit,
        slope_min: lo,
        slope_max: hi,
    }
}

fn sampled_ratio_decays(profile: &RadialProfile, beta: f64) -> bool {
    let ratios: Vec<f64> = (1..=12)
        .map(|j| {
            let t = profile.big_r * 10f64.powi(-j);
            profile.rho(t) / t.powf(beta)
        })
        .collect();
    ratios.windows(2).all(|w| w[1] < w[0]) && ratios[11] < 1e-2 * ratios[0]
}

/// Closed-form Burkholder energy of a radial map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialEnergy {
    pub value: f64,
    /// `π ρ(R)^p R^{2−p}`.
    pub outer_term: f64,
    /// `π lim ρ(t)^p t^{2−p}` at the origin.
    pub origin_term: f64,
    /// Set when the origin term does not vanish.
    pub aa1_violated: bool,
}

/// `π [ρ^p t^{2−p}]` from `0⁺` to `R`, valid for expanding profiles with
/// `p ≥ 1` and compressing profiles with `p ≤ 1`.
pub fn closed_form_energy(profile: &RadialProfile, p: f64) -> Result<RadialEnergy> {
    let class = classify_profile(profile, p, f64::INFINITY);
    let admissible = (p >= 1.0 && class.expanding) || (p <= 1.0 && class.compressing);
    if !admissible {
        return Err(crate::Error::Class(format!(
            "closed-form energy needs an expanding profile for p >= 1 or a compressing one for p <= 1 (p = {p})"
        )));
    }
    let outer_term = PI * profile.outer.powf(p) * profile.big_r.powf(2.0 - p);
    let origin_term = if p == 0.0 {
        0.0
    } else {
        let beta = 1.0 - 2.0 / p;
        match profile.origin_limit(beta) {
            OriginLimit::Zero => {
                if p > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            OriginLimit::Infinite => {
                if p > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            OriginLimit::Finite(c) => PI * c.powf(p),
            OriginLimit::Unknown => {
                let t = profile.big_r * 1e-12;
                PI * profile.rho(t).powf(p) * t.powf(2.0 - p)
            }
        }
    };
    Ok(RadialEnergy {
        value: outer_term - origin_term,
        outer_term,
        origin_term,
        aa1_violated: origin_term != 0.0,
    })
}
