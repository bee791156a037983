use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::packing::{Domain, NodeSpec, PackingSpec};

/// Outcome of a greedy disk fill.
#[derive(Clone, Debug, Serialize)]
pub struct FillReport {
    pub disks: usize,
    /// Uncovered fraction of the domain area.
    pub eps_achieved: f64,
    pub eps_target: f64,
}

/// Greedy packing of `domain` by disjoint disks carrying `ρ_K` with `r = 0`,
/// stopping once the uncovered area fraction falls below `eps` or after
/// `max_disks` disks.
///
/// Candidate centres are the points of an `m × m` clearance grid; each step
/// places the largest disk centred at a grid point.
pub fn fill_apk(domain: Domain, k: f64, eps: f64, max_disks: usize, m: usize) -> (PackingSpec, FillReport) {
    let [x0, x1, y0, y1] = domain.bounds();
    let hx = (x1 - x0) / m as f64;
    let hy = (y1 - y0) / m as f64;
    let pts: Vec<Complex64> = (0..m * m)
        .map(|i| Complex64::new(x0 + ((i % m) as f64 + 0.5) * hx, y0 + ((i / m) as f64 + 0.5) * hy))
        .collect();
    let mut clear: Vec<f64> = pts
        .iter()
        .map(|z| {
            if domain.contains(*z) {
                domain.clearance(*z)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let area = domain.area();
    let mut covered = 0.0;
    let mut nodes = Vec::new();
    while nodes.len() < max_disks && 1.0 - covered / area > eps {
        let (best, &rad) = clear
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        if rad <= 0.0 {
            break;
        }
        let zc = pts[best];
        nodes.push(NodeSpec::power(zc, rad, 0.0, k));
        covered += PI * rad * rad;
        for (z, cl) in pts.iter().zip(clear.iter_mut()) {
            let d = (z - zc).norm() - rad;
            if d < *cl {
                *cl = if d <= 0.0 { f64::NEG_INFINITY } else { d };
            }
        }
    }
    let report = FillReport {
        disks: nodes.len(),
        eps_achieved: (1.0 - covered / area).max(0.0),
        eps_target: eps,
    };
    (PackingSpec { domain, nodes }, report)
}
