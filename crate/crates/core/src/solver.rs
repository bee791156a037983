//! Principal solutions of `f_z̄ = μ f_z` by Neumann iteration of
//! `ω = μ S ω + μ`, and the analytic deformation family of a coefficient.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::functional::PlanarDeriv;
use crate::grid::{GridField, GridSpec};
use crate::radial::RadialCoefficient;
use crate::spectral::Spectral;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sampled Beltrami coefficient supported in a centred disk.
#[derive(Clone, Debug)]
pub struct BeltramiCoefficient {
    field: GridField,
    k: f64,
    support: f64,
}

impl BeltramiCoefficient {
    pub fn from_field(field: GridField, support: f64) -> Result<Self> {
        let k = field.max_abs();
        if k >= 1.0 {
            return Err(Error::DistortionBound { k });
        }
        Ok(BeltramiCoefficient { field, k, support })
    }

    /// `χ_{B(0, support)} f`, each cell weighted by the fraction of its area
    /// inside the disk.
    pub fn from_fn(spec: GridSpec, support: f64, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let mut field = GridField::zeros(spec);
        let h2 = spec.cell_area();
        let n = spec.n();
        for (idx, area) in spec.disk_cells(ZERO, support) {
            let z = spec.point(idx / n, idx % n);
            field.values_mut()[idx] = f(z) * (area / h2);
        }
        BeltramiCoefficient::from_field(field, support)
    }

    pub fn zero(spec: GridSpec) -> Self {
        BeltramiCoefficient {
            field: GridField::zeros(spec),
            k: 0.0,
            support: 0.0,
        }
    }

    /// `μ = k χ_D`.
    pub fn constant_disk(spec: GridSpec, k: f64) -> Result<Self> {
        BeltramiCoefficient::from_fn(spec, 1.0, |_| Complex64::new(k, 0.0))
    }

    /// `μ(z) = −(z/z̄) α(|z|)` on the unit disk.
    pub fn radial(spec: GridSpec, alpha: &RadialCoefficient) -> Result<Self> {
        BeltramiCoefficient::from_fn(spec, 1.0, |z| {
            let u = z / z.norm();
            -(u * u) * alpha.eval(z.norm())
        })
    }

    /// Random smooth coefficient with `sup |μ| = k`: a random trigonometric
    /// polynomial times the bump `exp(1 − 1/(1 − |z|²))`.
    pub fn random_smooth<R: Rng>(spec: GridSpec, rng: &mut R, k: f64) -> Result<Self> {
        let modes: Vec<(Complex64, f64, f64)> = (0..6)
            .map(|_| {
                (
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                )
            })
            .collect();
        let raw = GridField::from_fn(spec, |z| {
            let t2 = z.norm_sqr();
            if t2 >= 1.0 {
                return ZERO;
            }
            let bump = (1.0 - 1.0 / (1.0 - t2)).exp();
            let g: Complex64 = modes
                .iter()
                .map(|(c, a, b)| c * Complex64::from_polar(1.0, a * z.re + b * z.im))
                .sum();
            g * bump
        });
        let m = raw.max_abs();
        BeltramiCoefficient::from_field(raw.map(|v| v * (k / m)), 1.0)
    }

    /// Convolution with a normalized `C^∞` bump of radius `cells` grid cells.
    pub fn mollified(&self, cells: usize) -> Result<Self> {
        let spec = self.field.spec();
        let n = spec.n() as isize;
        let c = cells as isize;
        let mut kernel = Vec::new();
        for dy in -c..=c {
            for dx in -c..=c {
                let s2 = ((dx * dx + dy * dy) as f64) / ((c + 1) * (c + 1)) as f64;
                if s2 < 1.0 {
                    kernel.push((dy, dx, (1.0 - 1.0 / (1.0 - s2)).exp()));
                }
            }
        }
        let total: f64 = kernel.iter().map(|k| k.2).sum();
        let mut out = GridField::zeros(spec);
        for row in 0..n {
            for col in 0..n {
                let mut acc = ZERO;
                for &(dy, dx, w) in &kernel {
                    let (r, q) = (row + dy, col + dx);
                    if r >= 0 && r < n && q >= 0 && q < n {
                        acc += self.field.get(r as usize, q as usize) * w;
                    }
                }
                out.values_mut()[(row * n + col) as usize] = acc / total;
            }
        }
        BeltramiCoefficient::from_field(out, self.support + (cells as f64 + 1.0) * spec.step())
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn spec(&self) -> GridSpec {
        self.field.spec()
    }

    /// `sup |μ|` over the samples.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    /// Distortion `K = (1 + k)/(1 − k)`.
    pub fn distortion(&self) -> f64 {
        (1.0 + self.k) / (1.0 - self.k)
    }
}

/// Converged state of the Neumann iteration.
#[derive(Clone, Debug)]
pub struct PrincipalSolution {
    pub mu: BeltramiCoefficient,
    /// `ω = f_z̄`.
    pub omega: GridField,
    /// `Sω = f_z − 1`.
    pub s_omega: GridField,
    /// `‖ω − μSω − μ‖₂` of the stored state.
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    /// Leading expansion coefficients `b_1, b_2, …` of `f(z) = z + Σ b_n z^{−n}`.
    pub b: Vec<Complex64>,
}

/// Iteration cap `⌈log(tol(1−k)/‖μ‖₂)/log k⌉ + margin`.
pub fn iteration_bound(k: f64, mu_norm: f64, tol: f64, margin: usize) -> usize {
    if k == 0.0 || mu_norm <= tol {
        return margin;
    }
    let n = ((tol * (1.0 - k) / mu_norm).ln() / k.ln()).ceil().max(0.0);
    n as usize + margin
}

/// Order of the exponential filter applied to `S` inside the iteration. It
/// suppresses the axis-aligned ringing of the square frequency cut-off at
/// point singularities of `ω` and is harmless on resolved modes.
pub const FILTER_ORDER: i32 = 16;

/// Number of expansion coefficients stored on a solution.
pub const EXPANSION_TERMS: usize = 4;

pub fn solve_principal(mu: &BeltramiCoefficient, tol: f64) -> Result<PrincipalSolution> {
    let sp = Spectral::new(mu.spec());
    solve_with(&sp, mu, tol)
}

/// [`solve_principal`] reusing precomputed transforms.
pub fn solve_with(sp: &Spectral, mu: &BeltramiCoefficient, tol: f64) -> Result<PrincipalSolution> {
    if mu.k >= 1.0 {
        return Err(Error::DistortionBound { k: mu.k });
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let spec = mu.spec();
    let m = mu.field.values();
    let mu_norm = mu.field.norm_l2();
    if mu_norm == 0.0 {
        return Ok(PrincipalSolution {
            mu: mu.clone(),
            omega: GridField::zeros(spec),
            s_omega: GridField::zeros(spec),
            residual: 0.0,
            iterations: 0,
            history: Vec::new(),
            b: vec![ZERO; EXPANSION_TERMS],
        });
    }
    let cap = iteration_bound(mu.k, mu_norm, tol, 20);
    let h2 = spec.cell_area();
    let mut omega = mu.field.clone();
    let mut history = Vec::new();
    let mut n = 0;
    loop {
        let s = sp.beurling_filtered(&omega, FILTER_ORDER);
        let mut next = GridField::zeros(spec);
        let mut r2 = 0.0;
        for (i, v) in next.values_mut().iter_mut().enumerate() {
            *v = m[i] * s.values()[i] + m[i];
            r2 += (*v - omega.values()[i]).norm_sqr();
        }
        let residual = (r2 * h2).sqrt();
        history.push(residual);
        if residual <= tol {
            let b = expansion(&omega);
            return Ok(PrincipalSolution {
                mu: mu.clone(),
                omega,
                s_omega: s,
                residual,
                iterations: n,
                history,
                b,
            });
        }
        if n >= cap || !residual.is_finite() {
            return Err(Error::NonConvergence {
                iterations: n,
                residual,
                history,
            });
        }
        omega = next;
        n += 1;
    }
}

/// `b_n = (1/π) ∫ ζ^{n−1} ω(ζ) dζ`, from `f(z) = z + Cω(z)` expanded at ∞.
fn expansion(omega: &GridField) -> Vec<Complex64> {
    let spec = omega.spec();
    let n = spec.n();
    let h2 = spec.cell_area();
    let mut b = [ZERO; EXPANSION_TERMS];
    for row in 0..n {
        for col in 0..n {
            let w = omega.get(row, col);
            if w == ZERO {
                continue;
            }
            let z = spec.point(row, col);
            let mut zp = ONE;
            for bn in b.iter_mut() {
                *bn += zp * w;
                zp *= z;
            }
        }
    }
    b.iter().map(|v| v * h2 / PI).collect()
}

impl PrincipalSolution {
    pub fn spec(&self) -> GridSpec {
        self.omega.spec()
    }

    pub fn deriv_at(&self, idx: usize) -> PlanarDeriv {
        PlanarDeriv::new(ONE + self.s_omega.values()[idx], self.omega.values()[idx])
    }

    /// `J = |1 + Sω|² − |ω|²` per cell.
    pub fn jacobian(&self) -> Vec<f64> {
        (0..self.spec().len()).map(|i| self.deriv_at(i).jac()).collect()
    }

    /// `(row, col)` of cells inside the support with `J ≤ 0`.
    pub fn nonpositive_jacobian_cells(&self) -> Vec<(usize, usize)> {
        let spec = self.spec();
        let n = spec.n();
        let rad = self.mu.support;
        (0..spec.len())
            .filter(|&i| spec.point(i / n, i % n).norm() < rad && self.deriv_at(i).jac() <= 0.0)
            .map(|i| (i / n, i % n))
            .collect()
    }

    /// Cell weights of the unit disk: `(index, overlap area)`.
    pub fn disk_cells(&self) -> Vec<(usize, f64)> {
        self.spec().disk_cells(ZERO, 1.0)
    }

    /// `∫_D G(Df)` with overlap-weighted cell-centre quadrature.
    pub fn disk_integral(&self, g: impl Fn(&PlanarDeriv, Complex64) -> f64) -> f64 {
        self.disk_cells()
            .into_iter()
            .map(|(i, w)| w * g(&self.deriv_at(i), self.mu.field.values()[i]))
            .sum()
    }
}

/// `∫_D J(z, f) dz`.
pub fn area_integral(sol: &PrincipalSolution) -> f64 {
    sol.disk_integral(|d, _| d.jac())
}

/// Parameters of the deformation family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub p: f64,
    pub lambda: Complex64,
    /// `λ∘ = 1/(p − 1)`.
    pub lambda_naught: f64,
}

impl FamilyParams {
    pub fn new(p: f64, lambda: Complex64, k: f64) -> Result<Self> {
        let upper = if k > 0.0 { 1.0 + 1.0 / k } else { f64::INFINITY };
        if !(p >= 2.0 && p <= upper * (1.0 + 1e-12)) {
            return domain(format!("p = {p} outside [2, 1 + 1/k] for k = {k}"));
        }
        if !(lambda.norm() < 1.0) {
            return domain(format!("|lambda| = {} must be < 1", lambda.norm()));
        }
        Ok(FamilyParams {
            p,
            lambda,
            lambda_naught: 1.0 / (p - 1.0),
        })
    }
}

/// `τ_λ = pλ|μ| / ((1+λ)(1+|μ|) − pλ|μ|)`.
pub fn tau(m: f64, p: f64, lambda: Complex64) -> Complex64 {
    let den = (ONE + lambda) * (1.0 + m) - lambda * p * m;
    lambda * p * m / den
}

/// `μ_λ = τ_λ μ/|μ|`.
pub fn deform_family(mu: &BeltramiCoefficient, p: f64, lambda: Complex64) -> Result<BeltramiCoefficient> {
    let fp = FamilyParams::new(p, lambda, mu.k)?;
    let field = mu.field.map(|v| {
        let m = v.norm();
        if m == 0.0 {
            ZERO
        } else {
            tau(m, fp.p, fp.lambda) * (v / m)
        }
    });
    let k = field.max_abs();
    Ok(BeltramiCoefficient {
        field,
        k,
        support: mu.support,
    })
}

/// `Φ_λ = F^λ_z (1 + τ_λ)` together with the solution `F^λ`.
pub fn phi_field(
    mu: &BeltramiCoefficient,
    p: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<(GridField, PrincipalSolution)> {
    let sp = Spectral::new(mu.spec());
    phi_field_with(&sp, mu, p, lambda, tol)
}

pub fn phi_field_with(
    sp: &Spectral,
    mu: &BeltramiCoefficient,
    p: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<(GridField, PrincipalSolution)> {
    let ml = deform_family(mu, p, lambda)?;
    let sol = solve_with(sp, &ml, tol)?;
    let phi = GridField::from_values(
        mu.spec(),
        sol.s_omega
            .values()
            .iter()
            .zip(mu.field.values())
            .map(|(s, v)| (ONE + s) * (ONE + tau(v.norm(), p, lambda)))
            .collect(),
    )?;
    Ok((phi, sol))
}

/// Weight `1 − p|μ|/(1 + |μ|)` of the weighted inequality.
pub fn sigma_weight(m: f64, p: f64) -> f64 {
    1.0 - p * m / (1.0 + m)
}

/// Explicit quasiconformal map `f(z) = z + Σ A_j b((z − c_j)/s_j)` with
/// bumps `b(w) = exp(1 − 1/(1 − |w|²))`, equal to the identity outside the
/// unit disk. Its derivatives are known in closed form, so it is both a
/// source with identity boundary values and an oracle for the solver.
#[derive(Clone, Debug)]
pub struct BumpMap {
    bumps: Vec<(Complex64, f64, Complex64)>,
}

impl BumpMap {
    pub fn new(bumps: Vec<(Complex64, f64, Complex64)>) -> Result<Self> {
        for (c, s, _) in &bumps {
            if c.norm() + s > 1.0 || *s <= 0.0 {
                return domain("bumps must lie inside the unit disk");
            }
        }
        Ok(BumpMap { bumps })
    }

    /// Random bumps scaled so that `sup |μ| ≈ k` on the samples of `spec`.
    pub fn random<R: Rng>(rng: &mut R, spec: GridSpec, k: f64) -> Result<Self> {
        let count = rng.gen_range(2..=5);
        let mut bumps = Vec::with_capacity(count);
        for _ in 0..count {
            let s = rng.gen_range(0.3..0.7);
            let c = Complex64::from_polar(rng.gen_range(0.0..(1.0 - s)), rng.gen_range(0.0..2.0 * PI));
            let a = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI));
            bumps.push((c, s, a));
        }
        let base = BumpMap::new(bumps)?;
        let sup = |scale: f64| {
            let f = base.scaled(scale);
            let mut worst: f64 = 0.0;
            for row in 0..spec.n() {
                for col in 0..spec.n() {
                    let z = spec.point(row, col);
                    if z.norm() < 1.0 {
                        let d = f.deriv(z);
                        worst = worst.max(if d.jac() > 0.0 {
                            d.dzbar.norm() / d.dz.norm()
                        } else {
                            1.0
                        });
                    }
                }
            }
            worst
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while sup(hi) < k {
            hi *= 2.0;
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if sup(mid) < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(base.scaled(lo))
    }

    fn scaled(&self, s: f64) -> BumpMap {
        BumpMap {
            bumps: self.bumps.iter().map(|(c, r, a)| (*c, *r, a * s)).collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut f = z;
        for (c, s, a) in &self.bumps {
            let w = (z - c) / s;
            let q = w.norm_sqr();
            if q < 1.0 {
                f += a * (1.0 - 1.0 / (1.0 - q)).exp();
            }
        }
        f
    }

    pub fn deriv(&self, z: Complex64) -> PlanarDeriv {
        let mut dz = ONE;
        let mut dzbar = ZERO;
        for (c, s, a) in &self.bumps {
            let w = (z - c) / s;
            let q = w.norm_sqr();
            if q < 1.0 {
                let b = (1.0 - 1.0 / (1.0 - q)).exp();
                let f = -b / (s * (1.0 - q) * (1.0 - q));
                dz += a * f * w.conj();
                dzbar += a * f * w;
            }
        }
        PlanarDeriv::new(dz, dzbar)
    }

    pub fn coefficient(&self, spec: GridSpec) -> Result<BeltramiCoefficient> {
        let field = GridField::from_fn(spec, |z| {
            if z.norm() < 1.0 {
                self.deriv(z).beltrami().unwrap_or(ZERO)
            } else {
                ZERO
            }
        });
        BeltramiCoefficient::from_field(field, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{radial_deriv, rho_from_alpha};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, 4.0).unwrap()
    }

    #[test]
    fn zero_coefficient_is_identity() {
        let sol = solve_principal(&BeltramiCoefficient::zero(grid(64)), 1e-12).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.residual, 0.0);
        assert!((area_integral(&sol) - PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_coefficients() {
        let r = BeltramiCoefficient::constant_disk(grid(64), 1.0);
        assert!(matches!(r, Err(Error::DistortionBound { .. })));
    }

    #[test]
    fn constant_disk_oracle() {
        // f = z + k z̄ in D and z + k/z outside.
        let k = 0.3;
        let mut prev = f64::INFINITY;
        for n in [128, 256] {
            let spec = grid(n);
            let mu = BeltramiCoefficient::constant_disk(spec, k).unwrap();
            let sol = solve_principal(&mu, 1e-12).unwrap();
            let mut err: f64 = 0.0;
            for row in 0..n {
                for col in 0..n {
                    if spec.point(row, col).norm() <= 0.8 {
                        let d = sol.deriv_at(row * n + col);
                        err = err.max((d.dz - 1.0).norm()).max((d.dzbar - k).norm());
                    }
                }
            }
            assert!(err < prev);
            prev = err;
            assert!((sol.b[0] - k).norm() < 0.01, "{}", sol.b[0]);
            let a = area_integral(&sol);
            assert!((a - PI * (1.0 - k * k)).abs() < 0.01 * PI);
        }
        assert!(prev < 0.02, "{prev}");
    }

    #[test]
    fn residual_history_decays_geometrically() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mu = BeltramiCoefficient::random_smooth(grid(128), &mut rng, 0.3).unwrap();
        let sol = solve_principal(&mu, 1e-13).unwrap();
        let norm = mu.field().norm_l2();
        for (n, r) in sol.history.iter().enumerate() {
            assert!(*r <= 0.3f64.powi(n as i32) * norm / 0.7 + 1e-12);
        }
        assert!(sol.iterations <= iteration_bound(0.3, norm, 1e-13, 20));
        assert!(sol.nonpositive_jacobian_cells().is_empty());
    }

    #[test]
    fn bump_map_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = BumpMap::random(&mut rng, grid(128), 0.3).unwrap();
        let mut prev = f64::INFINITY;
        for n in [128, 256, 512] {
            let spec = grid(n);
            let mu = f.coefficient(spec).unwrap();
            let sol = solve_principal(&mu, 1e-12).unwrap();
            let mut err: f64 = 0.0;
            for i in 0..spec.len() {
                let z = spec.point(i / spec.n(), i % spec.n());
                let d = f.deriv(z);
                let s = sol.deriv_at(i);
                err = err.max((d.dz - s.dz).norm()).max((d.dzbar - s.dzbar).norm());
            }
            assert!(err < prev, "{err}");
            prev = err;
            assert!(sol.b[0].norm() < 1e-3);
            assert!((area_integral(&sol) - PI).abs() < 1e-3);
        }
        assert!(prev < 1e-3, "{prev}");
    }

    #[test]
    fn radial_coefficient_matches_profile() {
        let alpha = RadialCoefficient::constant(1.0 / 3.0).unwrap();
        let g = rho_from_alpha(&alpha).unwrap();
        let spec = GridSpec::new(256, 2.0).unwrap();
        let mu = BeltramiCoefficient::radial(spec, &alpha).unwrap();
        let sol = solve_principal(&mu, 1e-10).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..spec.len() {
            let z = spec.point(i / spec.n(), i % spec.n());
            if (0.1..=0.9).contains(&z.norm()) {
                let d = radial_deriv(&g, z).unwrap();
                let s = sol.deriv_at(i);
                worst = worst.max(((s.dz - d.dz).norm() + (s.dzbar - d.dzbar).norm()) / d.opnorm());
            }
        }
        assert!(worst < 0.015, "{worst}");
    }

    #[test]
    fn deformation_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mu = BeltramiCoefficient::random_smooth(grid(64), &mut rng, 1.0 / 3.0).unwrap();
        let zero = deform_family(&mu, 3.0, ZERO).unwrap();
        assert_eq!(zero.k(), 0.0);
        let back = deform_family(&mu, 3.0, Complex64::new(0.5, 0.0)).unwrap();
        let diff = back.field().zip_map(mu.field(), |a, b| a - b).max_abs();
        assert!(diff < 1e-12);
        let lam = Complex64::new(0.0, 0.5);
        let ml = deform_family(&mu, 3.0, lam).unwrap();
        assert!(ml.k() <= 0.5 + 1e-15);
        assert!(deform_family(&mu, 5.0, lam).is_err());
        assert!(deform_family(&mu, 3.0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn phi_family_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = GridSpec::new(128, 2.0).unwrap();
        let mu = BeltramiCoefficient::random_smooth(spec, &mut rng, 0.3).unwrap();
        let sp = Spectral::new(spec);
        let (phi0, _) = phi_field_with(&sp, &mu, 3.0, ZERO, 1e-12).unwrap();
        assert!(phi0.values().iter().all(|v| (v - 1.0).norm() < 1e-14));

        // At λ∘, |Φ| = |Df| of the principal solution for μ.
        let (phi, _) = phi_field_with(&sp, &mu, 3.0, Complex64::new(0.5, 0.0), 1e-12).unwrap();
        let sol = solve_with(&sp, &mu, 1e-12).unwrap();
        for i in (0..spec.len()).step_by(37) {
            assert!((phi.values()[i].norm() - sol.deriv_at(i).opnorm()).abs() < 1e-9);
        }

        // Weighted L² bound and the pointwise inequality behind it.
        for j in 0..5 {
            let lam = Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 5.0);
            let (phi, sol) = phi_field_with(&sp, &mu, 3.0, lam, 1e-12).unwrap();
            let mut m1 = 0.0;
            for (i, w) in sol.disk_cells() {
                let m = mu.field().values()[i].norm();
                let lhs = phi.values()[i].norm_sqr() * sigma_weight(m, 3.0);
                assert!(lhs <= sol.deriv_at(i).jac() + 1e-12);
                m1 += w * lhs / PI;
            }
            assert!(m1 <= 1.0 + 1e-3, "{m1}");
        }

        // Discrete mean value property in λ.
        let c = Complex64::new(0.1, 0.2);
        let (center, _) = phi_field_with(&sp, &mu, 3.0, c, 1e-13).unwrap();
        let mut mean = GridField::zeros(spec);
        for j in 0..8 {
            let lam = c + Complex64::from_polar(0.05, 2.0 * PI * j as f64 / 8.0);
            let (f, _) = phi_field_with(&sp, &mu, 3.0, lam, 1e-13).unwrap();
            mean = mean.zip_map(&f, |a, b| a + b / 8.0);
        }
        let dev = mean.zip_map(&center, |a, b| a - b).max_abs();
        assert!(dev < 1e-6 * center.max_abs(), "{dev}");
    }

    #[test]
    fn mollified_coefficient_stays_bounded() {
        let mu = BeltramiCoefficient::constant_disk(grid(128), 0.4).unwrap();
        let s = mu.mollified(4).unwrap();
        assert!(s.k() <= 0.4 + 1e-15);
        assert!((s.field().integral() - mu.field().integral()).norm() < 1e-12);
    }
}
