//! Pointwise Burkholder-type functionals on 2×2 and n×n matrices.
//!
//! Planar derivatives are carried in complex form `(f_z, f_z̄)`. For such a
//! pair `|Df| = |f_z| + |f_z̄|` is the operator norm and
//! `J = |f_z|² − |f_z̄|²` the Jacobian determinant. The Burkholder functional
//! is normalised so that `B_p(Id) = 1` for every real exponent, with the
//! `p ≤ 1` branch living on matrices of positive determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, invalid, Error, Result};

/// Complex derivative pair `(f_z, f_z̄)` of a planar map at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarDeriv {
    pub dz: Complex64,
    pub dzbar: Complex64,
}

impl PlanarDeriv {
    pub fn new(dz: Complex64, dzbar: Complex64) -> Self {
        Self { dz, dzbar }
    }

    pub fn identity() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Conformal derivative `z ↦ c z`.
    pub fn conformal(c: Complex64) -> Self {
        Self::new(c, Complex64::new(0.0, 0.0))
    }

    /// Operator norm `|f_z| + |f_z̄|`.
    pub fn opnorm(&self) -> f64 {
        self.dz.norm() + self.dzbar.norm()
    }

    pub fn jac(&self) -> f64 {
        self.dz.norm_sqr() - self.dzbar.norm_sqr()
    }

    /// Distortion `|Df|² / J`, defined when the Jacobian is positive.
    pub fn distortion(&self) -> Option<f64> {
        let j = self.jac();
        (j > 0.0).then(|| self.opnorm().powi(2) / j)
    }

    /// Beltrami coefficient `f_z̄ / f_z`.
    pub fn beltrami(&self) -> Option<Complex64> {
        (self.dz.norm() > 0.0).then(|| self.dzbar / self.dz)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(self.dz * t, self.dzbar * t)
    }

    /// Real 2×2 Jacobian matrix `[[u_x, u_y], [v_x, v_y]]` of `f = u + iv`.
    pub fn to_matrix(&self) -> MatrixN {
        let fx = self.dz + self.dzbar;
        let fy = Complex64::i() * (self.dz - self.dzbar);
        MatrixN {
            n: 2,
            entries: vec![fx.re, fy.re, fx.im, fy.im],
        }
    }

    pub fn from_matrix(a: &MatrixN) -> Result<Self> {
        if a.n != 2 {
            return invalid(format!("planar derivative needs a 2x2 matrix, got n = {}", a.n));
        }
        let (ux, uy, vx, vy) = (a.entries[0], a.entries[1], a.entries[2], a.entries[3]);
        Ok(Self::new(
            Complex64::new(0.5 * (ux + vy), 0.5 * (vx - uy)),
            Complex64::new(0.5 * (ux - vy), 0.5 * (vx + uy)),
        ))
    }
}

/// Square real matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixN {
    n: usize,
    entries: Vec<f64>,
}

impl MatrixN {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return invalid(format!("expected {} entries for n = {n}, got {}", n * n, entries.len()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut entries = vec![0.0; n * n];
        for (i, &x) in d.iter().enumerate() {
            entries[i * n + i] = x;
        }
        Self { n, entries }
    }

    /// Rank-one matrix `u ⊗ v`.
    pub fn outer(u: &[f64], v: &[f64]) -> Result<Self> {
        if u.len() != v.len() {
            return invalid("outer product of vectors with different lengths");
        }
        let n = u.len();
        let entries = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, other: &MatrixN, t: f64) -> MatrixN {
        debug_assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + t * b)
            .collect();
        MatrixN { n: self.n, entries }
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn det(&self) -> f64 {
        match self.n {
            1 => self.entries[0],
            2 => self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2],
            _ => self.to_dmatrix().determinant(),
        }
    }

    pub fn inverse(&self) -> Option<MatrixN> {
        let inv = self.to_dmatrix().try_inverse()?;
        Some(Self::from_dmatrix(&inv))
    }

    /// Whether all 2×2 minors vanish to within `tol·‖X‖²`.
    pub fn is_rank_one(&self, tol: f64) -> bool {
        let n = self.n;
        let scale = self.frobenius().powi(2);
        if scale == 0.0 {
            return false;
        }
        for i in 0..n {
            for k in i + 1..n {
                for j in 0..n {
                    for l in j + 1..n {
                        let minor = self.get(i, j) * self.get(k, l) - self.get(i, l) * self.get(k, j);
                        if minor.abs() > tol * scale {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(m[(i, j)]);
            }
        }
        Self { n, entries }
    }
}

/// Largest singular value `max_{|ξ|=1} |Aξ|`.
///
/// In the plane this is evaluated through the complex form; in higher
/// dimension through a symmetric eigensolve of `AᵀA`.
pub fn operator_norm(a: &MatrixN) -> Result<f64> {
    if a.entries.iter().any(|x| !x.is_finite()) {
        return invalid("operator norm of a matrix with non-finite entries");
    }
    match a.n {
        1 => Ok(a.entries[0].abs()),
        2 => Ok(PlanarDeriv::from_matrix(a)?.opnorm()),
        _ => {
            let m = a.to_dmatrix();
            let ata = m.transpose() * &m;
            let eig = ata
                .try_symmetric_eigen(1e-13, 0)
                .ok_or_else(|| Error::InvalidInput("eigensolver did not converge".into()))?;
            let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
            Ok(top.max(0.0).sqrt())
        }
    }
}

/// Planar Burkholder functional `B_p` for any real exponent.
///
/// For `p ≥ 1`: `(|f_z| − (p−1)|f_z̄|)(|f_z| + |f_z̄|)^{p−1}`.
/// For `p < 1`: `(|f_z| + (p−1)|f_z̄|)(|f_z| − |f_z̄|)^{p−1}`, defined on `J > 0`.
pub fn burkholder_p(d: &PlanarDeriv, p: f64) -> Result<f64> {
    if !p.is_finite() {
        return invalid("exponent must be finite");
    }
    let a = d.dz.norm();
    let b = d.dzbar.norm();
    if a + b == 0.0 {
        return if p > 0.0 {
            Ok(0.0)
        } else {
            domain(format!("B_p at the zero matrix is undefined for p = {p}"))
        };
    }
    if p >= 1.0 {
        Ok((a - (p - 1.0) * b) * (a + b).powf(p - 1.0))
    } else {
        let j = a - b;
        if j <= 0.0 || d.jac() <= 0.0 {
            return domain(format!("B_p with p = {p} < 1 needs a positive Jacobian"));
        }
        Ok((a + (p - 1.0) * b) * j.powf(p - 1.0))
    }
}

/// The n-dimensional functional `((p/n)det A + (1 − p/n)|A|ⁿ)|A|^{p−n}`, `p ≥ n`.
pub fn burkholder_nd(a: &MatrixN, p: f64) -> Result<f64> {
    let n = a.n as f64;
    if !(p >= n) {
        return domain(format!("B_p^n needs p >= n (p = {p}, n = {n})"));
    }
    let norm = operator_norm(a)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(((p / n) * a.det() + (1.0 - p / n) * norm.powf(n)) * norm.powf(p - n))
}

/// Burkholder's constant in `C_p(|f_z|^p − (p−1)^p|f_z̄|^p) ≤ B_p(Df)`.
///
/// `C_p = (1/p)(1 − 1/p)^{1−p}`, which makes the inequality sharp at the
/// identity when `p = 2`.
pub fn burkholder_constant(p: f64) -> f64 {
    (1.0 - 1.0 / p).powf(1.0 - p) / p
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn burkholder_lower_bound(d: &PlanarDeriv, p: f64) -> Result<LowerBound> {
    if !(p >= 2.0) {
        return domain(format!("the lower bound needs p >= 2, got {p}"));
    }
    let a = d.dz.norm();
    let b = d.dzbar.norm();
    let lhs = burkholder_constant(p) * (a.powf(p) - (p - 1.0).powf(p) * b.powf(p));
    Ok(LowerBound {
        lhs,
        rhs: burkholder_p(d, p)?,
    })
}

/// The functionals obtained by differentiating `B_p` at `p = 2` (`f`) and
/// its inverse transform (`h`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedValues {
    pub f: f64,
    pub h: f64,
}

/// `F = ½[(1 + log|Df|²)J − |Df|²]`.
pub fn log_energy_density(d: &PlanarDeriv) -> Result<f64> {
    let norm = d.opnorm();
    if norm == 0.0 {
        return domain("F is singular at the zero matrix");
    }
    let n2 = norm * norm;
    Ok(0.5 * ((1.0 + n2.ln()) * d.jac() - n2))
}

/// `H = ½|Df|²/J + log J − log|Df|`, on `J > 0`.
pub fn log_jacobian_density(d: &PlanarDeriv) -> Result<f64> {
    let j = d.jac();
    if j <= 0.0 {
        return domain("H needs a positive Jacobian");
    }
    let norm = d.opnorm();
    Ok(0.5 * norm * norm / j + j.ln() - norm.ln())
}

pub fn derived_functionals(d: &PlanarDeriv) -> Result<DerivedValues> {
    Ok(DerivedValues {
        f: log_energy_density(d)?,
        h: log_jacobian_density(d)?,
    })
}

/// A matrix functional that can be evaluated pointwise and probed along
/// rank-one lines.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    Determinant,
    /// Planar `B_p`, all real `p`.
    Burkholder(f64),
    /// `B_p^n`, `p ≥ n`.
    BurkholderNd(f64),
    /// `F`, the derivative of `B_p` at `p = 2`.
    LogEnergy,
    /// `H`, the inverse transform of `F`.
    LogJacobian,
    /// `Ê(A) = E(A⁻¹)·det A` on `det A > 0`.
    Inverse(Box<Functional>),
}

impl Functional {
    pub fn eval(&self, a: &MatrixN) -> Result<f64> {
        match self {
            Functional::Determinant => Ok(a.det()),
            Functional::Burkholder(p) => burkholder_p(&PlanarDeriv::from_matrix(a)?, *p),
            Functional::BurkholderNd(p) => burkholder_nd(a, *p),
            Functional::LogEnergy => log_energy_density(&PlanarDeriv::from_matrix(a)?),
            Functional::LogJacobian => log_jacobian_density(&PlanarDeriv::from_matrix(a)?),
            Functional::Inverse(inner) => inverse_functional(inner, a),
        }
    }

    /// Whether the functional is only defined on `det A > 0`.
    pub fn restricted(&self) -> bool {
        match self {
            Functional::Burkholder(p) => *p < 1.0,
            Functional::LogJacobian | Functional::Inverse(_) => true,
            _ => false,
        }
    }

    /// Degree of homogeneity for matrices of size `n`.
    pub fn degree(&self, n: usize) -> f64 {
        match self {
            Functional::Determinant => n as f64,
            Functional::Burkholder(p) | Functional::BurkholderNd(p) => *p,
            Functional::LogEnergy => 2.0,
            Functional::LogJacobian => 0.0,
            Functional::Inverse(inner) => n as f64 - inner.degree(n),
        }
    }
}

/// `E(A⁻¹)·det A` for `det A > 0`.
pub fn inverse_functional(e: &Functional, a: &MatrixN) -> Result<f64> {
    let det = a.det();
    if !(det > 0.0) {
        return domain(format!("inverse functional needs det A > 0, got {det}"));
    }
    let inv = a
        .inverse()
        .ok_or_else(|| Error::Domain("matrix is numerically singular".into()))?;
    Ok(e.eval(&inv)? * det)
}

/// Second differences of `t ↦ E(A + tX)` along a rank-one line.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub t: Vec<f64>,
    pub second_diff: Vec<f64>,
    /// Local magnitude of a second derivative of a function of the given
    /// homogeneity degree; tolerances are relative to it.
    pub scale: Vec<f64>,
    pub step: f64,
    /// Sub-interval of `[−radius, radius]` actually probed when the
    /// functional is restricted to `det > 0`.
    pub clipped: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl ProbeReport {
    pub fn max_second_diff(&self) -> f64 {
        self.second_diff.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_second_diff(&self) -> f64 {
        self.second_diff.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest second difference measured in units of the local scale.
    pub fn max_relative(&self) -> f64 {
        self.relative().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_relative(&self) -> f64 {
        self.relative().fold(f64::INFINITY, f64::min)
    }

    fn relative(&self) -> impl Iterator<Item = f64> + '_ {
        self.second_diff.iter().zip(&self.scale).map(|(d, s)| d / s)
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        self.relative().all(|r| r <= tol)
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.relative().all(|r| r >= -tol)
    }

    pub fn is_affine(&self, tol: f64) -> bool {
        self.relative().all(|r| r.abs() <= tol)
    }

    pub fn sign_profile(&self, tol: f64) -> Vec<Sign> {
        self.relative()
            .map(|r| {
                if r > tol {
                    Sign::Positive
                } else if r < -tol {
                    Sign::Negative
                } else {
                    Sign::Zero
                }
            })
            .collect()
    }
}

/// Probe `E` along `t ↦ A + tX` for a rank-one `X`.
///
/// The finite-difference step is `10⁻³(1 + ‖A‖)/‖X‖`. For functionals
/// restricted to `det > 0` the sample range is clipped to the component of
/// the line through `A` on which the determinant stays positive; since
/// `det(A + tX)` is affine in `t` for rank-one `X` this component is an
/// interval.
pub fn rank_one_probe(e: &Functional, a: &MatrixN, x: &MatrixN, radius: f64, samples: usize) -> Result<ProbeReport> {
    if a.n != x.n {
        return invalid("A and X have different sizes");
    }
    if !x.is_rank_one(1e-12) {
        return invalid("probe direction is not rank-one");
    }
    if !(radius >= 0.0) || samples == 0 {
        return invalid("probe needs radius >= 0 and at least one sample");
    }
    let norm_a = operator_norm(a)?;
    let norm_x = operator_norm(x)?;
    let h = 1e-3 * (1.0 + norm_a) / norm_x;

    let (mut lo, mut hi) = (-radius, radius);
    let mut clipped = None;
    if e.restricted() {
        let det0 = a.det();
        if !(det0 > 0.0) {
            return domain("restricted functional probed at a matrix with det <= 0");
        }
        let slope = 0.5 * (a.add_scaled(x, 1.0).det() - a.add_scaled(x, -1.0).det());
        let margin = 2.0 * h;
        if slope > 0.0 {
            lo = lo.max(-det0 / slope + margin);
        } else if slope < 0.0 {
            hi = hi.min(-det0 / slope - margin);
        }
        if lo > hi {
            lo = 0.0;
            hi = 0.0;
        }
        clipped = Some((lo, hi));
    }

    let deg = e.degree(a.n);
    let mut t = Vec::with_capacity(samples);
    let mut second_diff = Vec::with_capacity(samples);
    let mut scale = Vec::with_capacity(samples);
    for i in 0..samples {
        let ti = if samples == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (samples - 1) as f64
        };
        let vals = [
            e.eval(&a.add_scaled(x, ti - h))?,
            e.eval(&a.add_scaled(x, ti))?,
            e.eval(&a.add_scaled(x, ti + h))?,
        ];
        let m_norm = operator_norm(&a.add_scaled(x, ti))?.max(f64::MIN_POSITIVE);
        let magnitude = vals.iter().map(|v| v.abs()).fold(m_norm.powf(deg), f64::max);
        t.push(ti);
        second_diff.push((vals[2] - 2.0 * vals[1] + vals[0]) / (h * h));
        scale.push(magnitude * (norm_x / m_norm).powi(2));
    }
    Ok(ProbeReport {
        t,
        second_diff,
        scale,
        step: h,
        clipped,
    })
}
