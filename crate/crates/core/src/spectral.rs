//! Fourier multipliers on the periodized grid: the Beurling transform, the
//! Cauchy transform and the complex derivatives.
//!
//! With `ŵ(ξ) = ∫ w(x) e^{-i x·ξ} dx` and `ζ = ξ₁ + iξ₂` the operators act as
//!
//! ```text
//! ∂̄  ->  (i/2) ζ        ∂  ->  (i/2) ζ̄
//! C   ->  -2i / ζ        S  ->  ζ̄ / ζ
//! ```
//!
//! so that `∂̄ C = I` and `∂ C = S`. With this sign `S χ_D = -1/z²` outside the
//! unit disk. The zero mode of `C` and `S` is set to 0.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{GridField, GridSpec};

/// Precomputed plans and frequency table for one grid.
pub struct Spectral {
    spec: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Complex frequency `ζ` per Fourier cell, row-major like the data.
    zeta: Vec<Complex64>,
}

impl Spectral {
    pub fn new(spec: GridSpec) -> Self {
        let n = spec.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scale = std::f64::consts::PI / spec.half_side();
        let freq = |j: usize| {
            let k = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            k * scale
        };
        let mut zeta = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                zeta.push(Complex64::new(freq(col), freq(row)));
            }
        }
        Spectral { spec, fwd, inv, zeta }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.spec.n();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }

    /// Applies the multiplier `m(ζ)` to `w`.
    pub fn apply(&self, w: &GridField, m: impl Fn(Complex64) -> Complex64) -> GridField {
        debug_assert_eq!(w.spec(), self.spec);
        let mut data = w.values().to_vec();
        self.transform(&mut data, &self.fwd);
        let norm = 1.0 / self.spec.len() as f64;
        for (v, z) in data.iter_mut().zip(&self.zeta) {
            *v *= m(*z) * norm;
        }
        self.transform(&mut data, &self.inv);
        GridField::from_values(self.spec, data).expect("finite multiplier output")
    }

    pub fn beurling(&self, w: &GridField) -> GridField {
        self.apply(w, beurling_symbol)
    }

    /// `S` composed with the exponential filter `exp(−36 (|ζ|/ζ_N)^{order})`,
    /// `ζ_N` the Nyquist frequency. The symbol keeps modulus at most 1.
    pub fn beurling_filtered(&self, w: &GridField, order: i32) -> GridField {
        let cut = std::f64::consts::PI * self.spec.n() as f64 / (2.0 * self.spec.half_side());
        self.apply(w, |z| beurling_symbol(z) * (-36.0 * (z.norm() / cut).powi(order)).exp())
    }

    pub fn cauchy(&self, w: &GridField) -> GridField {
        self.apply(w, |z| {
            if z.norm_sqr() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -2.0) / z
            }
        })
    }

    pub fn dbar(&self, w: &GridField) -> GridField {
        self.apply(w, |z| Complex64::new(0.0, 0.5) * z)
    }

    pub fn d(&self, w: &GridField) -> GridField {
        self.apply(w, |z| Complex64::new(0.0, 0.5) * z.conj())
    }
}

fn beurling_symbol(z: Complex64) -> Complex64 {
    let n = z.norm_sqr();
    if n == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z.conj() * z.conj() / n
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Beurling transform of `w` on its grid.
pub fn beurling(w: &GridField) -> GridField {
    Spectral::new(w.spec()).beurling(w)
}

/// Mean-zero solution `h` of `∂̄h = w` on the periodized grid.
pub fn cauchy(w: &GridField) -> GridField {
    Spectral::new(w.spec()).cauchy(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(spec: GridSpec, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField::from_fn(spec, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn indicator(spec: GridSpec, radius: f64) -> GridField {
        let mut w = GridField::zeros(spec);
        let h2 = spec.cell_area();
        for (idx, a) in spec.disk_cells(Complex64::new(0.0, 0.0), radius) {
            w.values_mut()[idx] = Complex64::new(a / h2, 0.0);
        }
        w
    }

    #[test]
    fn constant_maps_to_zero() {
        let spec = GridSpec::new(64, 4.0).unwrap();
        let s = beurling(&GridField::from_fn(spec, |_| Complex64::new(2.0, -1.0)));
        assert!(s.max_abs() < 1e-13);
    }

    #[test]
    fn isometry_modulo_mean() {
        let spec = GridSpec::new(128, 4.0).unwrap();
        let w = random_field(spec, 1);
        let s = beurling(&w);
        let lhs = s.norm_l2().powi(2);
        let rhs = w.norm_l2().powi(2) - w.mean().norm_sqr() * (2.0 * spec.half_side()).powi(2);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);

        let m = w.mean();
        let w0 = w.map(|v| v - m);
        let s0 = beurling(&w0);
        assert!((s0.norm_l2() - w0.norm_l2()).abs() <= 1e-10 * w0.norm_l2());
    }

    #[test]
    fn cauchy_inverts_dbar_and_composes_to_beurling() {
        let spec = GridSpec::new(64, 4.0).unwrap();
        let sp = Spectral::new(spec);
        let w = random_field(spec, 2);
        let m = w.mean();
        let w = w.map(|v| v - m);
        let c = sp.cauchy(&w);
        let back = sp.dbar(&c);
        let err = back.zip_map(&w, |a, b| a - b).norm_l2();
        assert!(err <= 1e-9 * w.norm_l2(), "{err}");
        let dc = sp.d(&c);
        let s = sp.beurling(&w);
        assert!(dc.zip_map(&s, |a, b| a - b).norm_l2() <= 1e-9 * s.norm_l2());
        assert!(cauchy(&GridField::zeros(spec)).max_abs() == 0.0);
    }

    #[test]
    fn indicator_identities() {
        // w = χ_D - χ_{2D}/4 has mean zero. C w = 3z̄/4 in D, 1/z - z̄/4 on
        // 1 < |z| < 2 and 0 outside 2D; S w = -1/z² on 1 < |z| < 2.
        let mut prev = f64::INFINITY;
        for n in [128, 256, 512] {
            let spec = GridSpec::new(n, 4.0).unwrap();
            let one = indicator(spec, 1.0);
            let two = indicator(spec, 2.0);
            let w = one.zip_map(&two, |a, b| a - 0.25 * b);
            let s = beurling(&w);
            let c = cauchy(&w);
            let s1 = beurling(&one);
            let mut s_err: f64 = 0.0;
            let mut s1_err: f64 = 0.0;
            let mut c_diff = Vec::new();
            for row in 0..n {
                for col in 0..n {
                    let z = spec.point(row, col);
                    let t = z.norm();
                    if (1.2..=1.8).contains(&t) {
                        s_err = s_err.max((s.get(row, col) + 1.0 / (z * z)).norm());
                        s1_err = s1_err.max((s1.get(row, col) + 1.0 / (z * z)).norm());
                        c_diff.push(c.get(row, col) - (1.0 / z - 0.25 * z.conj()));
                    } else if t < 0.8 {
                        s1_err = s1_err.max(s1.get(row, col).norm());
                        c_diff.push(c.get(row, col) - 0.75 * z.conj());
                    } else if (2.2..=3.0).contains(&t) {
                        c_diff.push(c.get(row, col));
                    }
                }
            }
            let mean = c_diff.iter().sum::<Complex64>() / c_diff.len() as f64;
            let c_err = c_diff.iter().map(|d| (d - mean).norm()).fold(0.0, f64::max);
            // Gibbs error from the jump decays like 1/N away from the circle.
            assert!(s_err < 4.0 / n as f64, "n={n} s_err={s_err}");
            assert!(s1_err < 8.0 / n as f64, "n={n} s1_err={s1_err}");
            assert!(c_err < 0.005, "n={n} c_err={c_err}");
            assert!(s_err < prev);
            prev = s_err;
        }
    }
}
