//! One-dimensional adaptive quadrature and exact disk/cell overlap areas.

/// Value of an integral together with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// False when panel contributions failed to decay (divergent integrand).
    pub converged: bool,
}

impl Integral {
    pub(crate) fn zero() -> Self {
        Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
        }
    }

    pub(crate) fn add(self, other: Integral) -> Integral {
        Integral {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Gauss–Kronrod rule on `[a, b]` with its embedded 7-point Gauss
/// estimate as error.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive bisection with Gauss–Kronrod panels.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> Integral {
    adaptive_inner(f, a, b, tol, 48)
}

fn adaptive_inner<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Integral {
    let (value, error) = gauss_kronrod(f, a, b);
    if error <= tol.max(1e-15 * value.abs()) || depth == 0 || (b - a).abs() < 1e-300 {
        return Integral {
            value,
            error,
            converged: value.is_finite(),
        };
    }
    let m = 0.5 * (a + b);
    adaptive_inner(f, a, m, 0.5 * tol, depth - 1).add(adaptive_inner(f, m, b, 0.5 * tol, depth - 1))
}

/// `∫₀ᵇ f` for integrands that may be singular at the origin.
///
/// Sums adaptive integrals over dyadic panels `[b/2^{j+1}, b/2^j]` until
/// several consecutive panels fall below the tolerance. A sequence of
/// non-decaying panels marks the integral as divergent.
pub fn integrate_to_zero<F: FnMut(f64) -> f64>(f: &mut F, b: f64, tol: f64) -> Integral {
    let mut total = Integral::zero();
    let mut hi = b;
    let mut small = 0;
    let mut prev = f64::INFINITY;
    let mut growing = 0;
    for _ in 0..1000 {
        let lo = 0.5 * hi;
        let panel = adaptive(f, lo, hi, 0.1 * tol);
        total = total.add(panel);
        let mag = panel.value.abs();
        if mag <= tol * 1e-2 {
            small += 1;
            if small >= 4 {
                // Geometric tail bounded by the last panel.
                total.error += mag;
                return total;
            }
        } else {
            small = 0;
        }
        if mag >= prev * 0.999 && mag > tol {
            growing += 1;
            if growing > 60 {
                total.converged = false;
                return total;
            }
        } else {
            growing = 0;
        }
        prev = mag;
        hi = lo;
        if hi < 1e-290 {
            break;
        }
    }
    total.converged = total.converged && small > 0;
    total
}

/// Area of `{|z − (cx, cy)| < r} ∩ [x0, x1] × [y0, y1]`.
pub fn disk_rect_overlap(cx: f64, cy: f64, r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (x0, x1, y0, y1) = (x0 - cx, x1 - cx, y0 - cy, y1 - cy);
    let lo = x0.max(-r);
    let hi = x1.min(r);
    if lo >= hi || y0 >= r || y1 <= -r {
        return 0.0;
    }
    // Breakpoints where the chord half-height h(s) = √(r² − s²) crosses |y0| or |y1|.
    let mut cuts = vec![lo, hi];
    for y in [y0, y1] {
        if y.abs() < r {
            let s = (r * r - y * y).sqrt();
            cuts.extend([-s, s]);
        }
    }
    cuts.retain(|s| *s >= lo && *s <= hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    // Antiderivative of the chord half-height.
    let big_h = |s: f64| {
        let s = s.clamp(-r, r);
        0.5 * (s * (r * r - s * s).max(0.0).sqrt() + r * r * (s / r).asin())
    };
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = 0.5 * (a + b);
        let hm = (r * r - m * m).max(0.0).sqrt();
        let top_is_chord = hm < y1;
        let bottom_is_chord = -hm > y0;
        let top_const = if top_is_chord { 0.0 } else { y1 };
        let bottom_const = if bottom_is_chord { 0.0 } else { y0 };
        if (if top_is_chord { hm } else { y1 }) <= (if bottom_is_chord { -hm } else { y0 }) {
            continue;
        }
        let chord_terms = (top_is_chord as u8 + bottom_is_chord as u8) as f64;
        area += chord_terms * (big_h(b) - big_h(a)) + (top_const - bottom_const) * (b - a);
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let (v, _) = gauss_kronrod(&mut |x: f64| x.powi(20) - 3.0 * x.powi(7), 0.0, 1.0);
        assert!((v - (1.0 / 21.0 - 3.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn singular_power_integrands() {
        for a in [-0.5, -0.9, 0.3, 2.0] {
            let r = integrate_to_zero(&mut |t: f64| t.powf(a), 1.0, 1e-13);
            assert!(r.converged);
            assert!((r.value - 1.0 / (a + 1.0)).abs() < 1e-11, "a={a}: {}", r.value);
        }
        let log = integrate_to_zero(&mut |t: f64| t * t.ln(), 1.0, 1e-13);
        assert!((log.value + 0.25).abs() < 1e-12);
        let div = integrate_to_zero(&mut |t: f64| 1.0 / t, 1.0, 1e-12);
        assert!(!div.converged);
    }

    #[test]
    fn overlap_areas() {
        assert!((disk_rect_overlap(0.0, 0.0, 1.0, -2.0, 2.0, -2.0, 2.0) - PI).abs() < 1e-14);
        assert!((disk_rect_overlap(0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 2.0) - PI / 4.0).abs() < 1e-14);
        assert!((disk_rect_overlap(0.0, 0.0, 1.0, -0.1, 0.1, -0.1, 0.1) - 0.04).abs() < 1e-15);
        assert_eq!(disk_rect_overlap(0.0, 0.0, 1.0, 1.0, 2.0, 0.0, 1.0), 0.0);
        // Half plane cut: segment area of the unit disk above y = 0.5.
        let seg = disk_rect_overlap(0.0, 0.0, 1.0, -2.0, 2.0, 0.5, 2.0);
        let exact = PI / 3.0 - 0.75f64.sqrt() / 2.0;
        assert!((seg - exact).abs() < 1e-14, "{seg} vs {exact}");
    }

    #[test]
    fn overlap_tiles_sum_to_disk_area() {
        let n = 37;
        let h = 3.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x0 = -1.5 + i as f64 * h;
                let y0 = -1.5 + j as f64 * h;
                total += disk_rect_overlap(0.13, -0.07, 1.1, x0, x0 + h, y0, y0 + h);
            }
        }
        assert!((total - PI * 1.21).abs() < 1e-12);
    }
}
