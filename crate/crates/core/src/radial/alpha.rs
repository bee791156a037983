use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::quadrature::adaptive;

use super::profile::{radial_deriv, ProfileKind, RadialProfile};

#[derive(Clone)]
enum AlphaKind {
    Constant(f64),
    /// `α(t) = c t`.
    Linear(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Radial Beltrami data `μ(z) = −(z/z̄) α(|z|)` on the unit disk.
#[derive(Clone)]
pub struct RadialCoefficient {
    kind: AlphaKind,
    /// Points in `(0, 1)` where `α` may jump.
    breaks: Vec<f64>,
}

impl fmt::Debug for RadialCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlphaKind::Constant(a) => write!(f, "alpha = {a}"),
            AlphaKind::Linear(c) => write!(f, "alpha = {c} t"),
            AlphaKind::Custom(_) => write!(f, "alpha = custom"),
        }
    }
}

impl RadialCoefficient {
    pub fn constant(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return domain(format!("alpha = {a} outside [0, 1]"));
        }
        Ok(RadialCoefficient {
            kind: AlphaKind::Constant(a),
            breaks: Vec::new(),
        })
    }

    pub fn linear(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return domain(format!("alpha = {c} t leaves [0, 1]"));
        }
        Ok(RadialCoefficient {
            kind: AlphaKind::Linear(c),
            breaks: Vec::new(),
        })
    }

    /// Arbitrary measurable `α`; values are checked on a sample grid.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let c = RadialCoefficient {
            kind: AlphaKind::Custom(Arc::new(f)),
            breaks: Vec::new(),
        };
        for i in 1..=1000 {
            let t = i as f64 / 1000.0;
            let a = c.eval(t);
            if !(0.0..=1.0).contains(&a) {
                return domain(format!("alpha({t}) = {a} outside [0, 1]"));
            }
        }
        Ok(c)
    }

    /// `α` recovered from an expanding profile: `α = (1 − σ)/(1 + σ)` with
    /// `σ = tρ̇/ρ`.
    pub fn from_profile(profile: &RadialProfile) -> Result<Self> {
        let p = profile.clone();
        let mut c = RadialCoefficient::from_fn(move |t| {
            let s = p.log_slope(t);
            ((1.0 - s) / (1.0 + s)).max(0.0)
        })?;
        let scale = profile.outer_radius();
        c.breaks = match profile.kind() {
            ProfileKind::Table { knots } => knots.iter().map(|k| k.0 / scale).collect(),
            _ => vec![profile.inner() / scale],
        };
        c.breaks.retain(|t| *t > 0.0 && *t < 1.0);
        Ok(c)
    }

    /// `∫_t^1 h(α(s)) ds/s`, split at the jump points of `α`.
    fn log_quad(&self, t: f64, h: impl Fn(f64) -> f64, tol: f64) -> f64 {
        let mut cuts = vec![t.ln()];
        cuts.extend(self.breaks.iter().filter(|b| **b > t).map(|b| b.ln()));
        cuts.push(0.0);
        cuts.windows(2)
            .map(|w| adaptive(&mut |u: f64| h(self.eval(u.exp())), w[0], w[1], tol).value)
            .sum()
    }

    /// Largest value on the open interval `(0, 1)`, sampled.
    fn interior_sup(&self) -> f64 {
        (1..4000).map(|i| self.eval(i as f64 / 4000.0)).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            AlphaKind::Constant(a) => *a,
            AlphaKind::Linear(c) => c * t,
            AlphaKind::Custom(f) => f(t),
        }
    }

    /// `sup α`, exact for closed forms and sampled otherwise.
    pub fn sup(&self) -> f64 {
        match &self.kind {
            AlphaKind::Constant(a) => *a,
            AlphaKind::Linear(c) => *c,
            AlphaKind::Custom(_) => (0..=4000).map(|i| self.eval(i as f64 / 4000.0)).fold(0.0, f64::max),
        }
    }

    /// `∫_t^1 α(s)/s ds`.
    pub fn log_integral(&self, t: f64) -> f64 {
        match &self.kind {
            AlphaKind::Constant(a) => -a * t.ln(),
            AlphaKind::Linear(c) => c * (1.0 - t),
            AlphaKind::Custom(_) => self.log_quad(t, |a| a, 1e-13),
        }
    }

    /// Closed-form `Sμ(z) = 2∫_{|z|}^1 α(s)/s ds − α(|z|)` inside the disk.
    pub fn beurling(&self, t: f64) -> f64 {
        2.0 * self.log_integral(t) - self.eval(t)
    }

    /// Whether `∫₀¹ (1 − α(t))/t dt = ∞`; `None` when not decidable.
    pub fn divergent(&self) -> Option<bool> {
        match &self.kind {
            AlphaKind::Constant(a) => Some(*a < 1.0),
            AlphaKind::Linear(_) => Some(true),
            AlphaKind::Custom(_) => None,
        }
    }
}

/// Profile with `μ_g = −(z/z̄) α(|z|)` on `0 < t ≤ 1` and `ρ(1) = 1`.
///
/// Integrates `d log ρ / d log t = (1 − α)/(1 + α)` from `t = 1` downward.
pub fn rho_from_alpha(alpha: &RadialCoefficient) -> Result<RadialProfile> {
    if alpha.interior_sup() >= 1.0 {
        return domain("alpha must stay below 1 for a quasiconformal profile");
    }
    let a = alpha.clone();
    let slope = |v: f64| (1.0 - v) / (1.0 + v);
    let f = move |t: f64| {
        let rho = (-a.log_quad(t, slope, 1e-14)).exp();
        (rho, rho / t * slope(a.eval(t)))
    };
    RadialProfile::custom(0.0, 1.0, 1.0, Arc::new(f))
}

/// `α` seen by `radial_deriv`, for round-trip checks.
pub fn alpha_of(profile: &RadialProfile, t: f64) -> Result<f64> {
    let d = radial_deriv(profile, num_complex::Complex64::new(t, 0.0))?;
    Ok(d.dzbar.norm() / d.dz.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn zero_alpha_gives_identity() {
        let g = rho_from_alpha(&RadialCoefficient::constant(0.0).unwrap()).unwrap();
        for t in [0.01, 0.3, 0.99] {
            assert!((g.rho(t) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_alpha_gives_power() {
        for k in [0.2, 1.0 / 3.0, 0.6] {
            let g = rho_from_alpha(&RadialCoefficient::constant(k).unwrap()).unwrap();
            let s = (1.0 - k) / (1.0 + k);
            for t in [0.001, 0.05, 0.5, 0.9] {
                assert!((g.rho(t) - t.powf(s)).abs() < 1e-12 * t.powf(s));
            }
        }
    }

    #[test]
    fn linear_alpha_round_trip() {
        let alpha = RadialCoefficient::linear(1.0).unwrap();
        let g = rho_from_alpha(&alpha).unwrap();
        for t in [0.05, 0.2, 0.5, 0.8] {
            let z = Complex64::from_polar(t, 1.1);
            let mu = radial_deriv(&g, z).unwrap().beltrami().unwrap();
            assert!((mu + z / z.conj() * t).norm() < 1e-10);
        }
        // log ρ(t) = −∫_t^1 (1/s − 2/(1+s)) ds = log t + 2 log(2/(1+t)).
        for t in [0.1, 0.6] {
            let exact: f64 = t * (2.0 / (1.0 + t)) * (2.0 / (1.0 + t));
            assert!((g.rho(t) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(RadialCoefficient::constant(1.2).is_err());
        assert!(RadialCoefficient::from_fn(|t| t - 0.5).is_err());
        assert!(rho_from_alpha(&RadialCoefficient::constant(1.0).unwrap()).is_err());
    }

    #[test]
    fn closed_form_beurling() {
        let a = RadialCoefficient::constant(0.5).unwrap();
        assert!((a.beurling(0.25) - (-(0.25f64).ln() - 0.5)).abs() < 1e-15);
        let custom = RadialCoefficient::from_fn(|t| 0.5 * t * t).unwrap();
        // 2∫_t^1 s/2 ds − t²/2 = (1 − t²)/2 − t²/2.
        assert!((custom.beurling(0.3) - (0.5 - 0.09)).abs() < 1e-12);
    }

    fn expanding_table() -> impl Strategy<Value = RadialProfile> {
        (prop::collection::vec((0.05f64..1.0, 0.0f64..1.0), 2..5)).prop_map(|raw| {
            let mut ts: Vec<f64> = raw.iter().map(|r| r.0).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() < 0.02);
            ts.retain(|t| *t < 0.98);
            // Work downward from ρ(1) = 1 keeping ρ/t ≥ ρ̇ ≥ 0.2 ρ/t.
            let mut knots = vec![(1.0, 1.0)];
            for (i, t) in ts.iter().rev().enumerate() {
                let (t1, r1) = *knots.last().unwrap();
                let d = t1 - t;
                let lo = r1 * t / t1;
                let hi = r1 / (1.0 + 0.2 * d / t);
                let u = raw[i % raw.len()].1;
                knots.push((*t, lo + u * (hi - lo)));
            }
            knots.push((0.0, 0.0));
            knots.reverse();
            RadialProfile::table(0.0, knots).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn profile_round_trip(g in prop_oneof![
            (0.05f64..=1.0).prop_map(|s| RadialProfile::power_exponent(s, 0.0, 1.0).unwrap()),
            expanding_table(),
        ]) {
            let alpha = RadialCoefficient::from_profile(&g).unwrap();
            let back = rho_from_alpha(&alpha).unwrap();
            for i in 0..=40 {
                let t = 0.01 * 100f64.powf(i as f64 / 40.0);
                prop_assert!((back.rho(t) - g.rho(t)).abs() <= 1e-8, "t={} {} vs {}", t, back.rho(t), g.rho(t));
                let a = alpha_of(&back, t).unwrap();
                prop_assert!((a - alpha.eval(t)).abs() <= 1e-10);
            }
        }
    }
}
