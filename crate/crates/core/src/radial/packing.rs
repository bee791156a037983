use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::PlanarDeriv;
use crate::grid::{GridField, GridSpec};
use crate::quadrature::Integral;

use super::profile::{classify_profile, closed_form_energy, radial_deriv, ProfileKind, RadialProfile};

/// The domain `Ω` carrying a packing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain {
    Disk { center: [f64; 2], radius: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Domain::Disk { radius, .. } => PI * radius * radius,
            Domain::Rect { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Domain::Disk { center, radius } => (z - c(center)).norm() < radius,
            Domain::Rect { x0, x1, y0, y1 } => z.re > x0 && z.re < x1 && z.im > y0 && z.im < y1,
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn clearance(&self, z: Complex64) -> f64 {
        match *self {
            Domain::Disk { center, radius } => radius - (z - c(center)).norm(),
            Domain::Rect { x0, x1, y0, y1 } => (z.re - x0).min(x1 - z.re).min(z.im - y0).min(y1 - z.im),
        }
    }

    /// `[x0, x1, y0, y1]`.
    pub fn bounds(&self) -> [f64; 4] {
        match *self {
            Domain::Disk { center, radius } => [
                center[0] - radius,
                center[0] + radius,
                center[1] - radius,
                center[1] + radius,
            ],
            Domain::Rect { x0, x1, y0, y1 } => [x0, x1, y0, y1],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Disk { radius, .. } => radius > 0.0 && radius.is_finite(),
            Domain::Rect { x0, x1, y0, y1 } => x1 > x0 && y1 > y0 && x0.is_finite() && y1.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("degenerate domain {self:?}")))
        }
    }
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Identity,
    Power,
    Table,
}

/// One disk of a packing description. Children lie in the linear core
/// `B(center, r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub center: [f64; 2],
    #[serde(rename = "R")]
    pub outer: f64,
    #[serde(default)]
    pub r: f64,
    pub kind: KindSpec,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Power exponent `s` in `ρ ∝ t^s`, overriding `1/K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// `(t, ρ)` pairs from `r` to `R` for table kinds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub knots: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    pub fn power(center: Complex64, outer: f64, r: f64, k: f64) -> Self {
        NodeSpec {
            center: [center.re, center.im],
            outer,
            r,
            kind: KindSpec::Power,
            k: Some(k),
            exponent: None,
            knots: Vec::new(),
            children: Vec::new(),
        }
    }

    fn profile(&self) -> Result<RadialProfile> {
        let spec_err = |e: Error| Error::InvalidSpec(e.to_string());
        match self.kind {
            KindSpec::Identity => {
                RadialProfile::new(self.r, self.outer, ProfileKind::Identity, self.outer).map_err(spec_err)
            }
            KindSpec::Power => {
                let s = match (self.exponent, self.k) {
                    (Some(s), _) => s,
                    (None, Some(k)) if k >= 1.0 => 1.0 / k,
                    _ => return Err(Error::InvalidSpec("power node needs K >= 1 or an exponent".into())),
                };
                RadialProfile::power_exponent(s, self.r, self.outer).map_err(spec_err)
            }
            KindSpec::Table => {
                let knots: Vec<(f64, f64)> = self.knots.iter().map(|k| (k[0], k[1])).collect();
                let p = RadialProfile::table(self.r, knots).map_err(spec_err)?;
                if (p.outer_radius() - self.outer).abs() > 1e-12 * self.outer
                    || (p.outer_value() - self.outer).abs() > 1e-12 * self.outer
                {
                    return Err(Error::InvalidSpec("table must end at (R, R)".into()));
                }
                Ok(p)
            }
        }
    }
}

/// Structured packing description, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingSpec {
    pub domain: Domain,
    #[serde(default)]
    pub nodes: Vec<NodeSpec>,
}

impl PackingSpec {
    pub fn empty(domain: Domain) -> Self {
        PackingSpec {
            domain,
            nodes: Vec::new(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn depth(&self) -> usize {
        fn d(n: &NodeSpec) -> usize {
            1 + n.children.iter().map(d).max().unwrap_or(0)
        }
        self.nodes.iter().map(d).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        fn cnt(n: &NodeSpec) -> usize {
            1 + n.children.iter().map(cnt).sum::<usize>()
        }
        self.nodes.iter().map(cnt).sum()
    }
}

/// Class a packing is required to belong to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassTarget {
    Any,
    /// `A^p(Ω)`: expanding profiles obeying the `p`-dependent bounds.
    Ap {
        p: f64,
    },
    /// `A^p_K(Ω)`: `ρ_K` at every step and `r = 0` at terminal disks.
    ApK {
        p: f64,
        k: f64,
    },
}

/// A disk of an evaluable packing with the affine map it was inserted into.
#[derive(Clone, Debug)]
pub struct PackingNode {
    pub center: Complex64,
    pub profile: RadialProfile,
    /// Inherited affine map `w ↦ a w + b`.
    pub a: Complex64,
    pub b: Complex64,
    pub children: Vec<PackingNode>,
}

impl PackingNode {
    pub fn outer(&self) -> f64 {
        self.profile.outer_radius()
    }

    pub fn inner(&self) -> f64 {
        self.profile.inner()
    }

    /// Affine map active on the linear core.
    pub fn core_affine(&self) -> Option<(Complex64, Complex64)> {
        self.profile
            .core_slope()
            .map(|s| (self.a * s, self.b + self.a * self.center * (1.0 - s)))
    }
}

/// Where a point sits in the packing tree.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Linear { a: Complex64, b: Complex64 },
    Annulus(&'a PackingNode),
}

/// Membership flags of a built map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassTags {
    pub expanding: bool,
    pub compressing: bool,
    pub in_ap: bool,
    pub in_apk: bool,
}

/// Piecewise radial map built from a packing.
#[derive(Clone, Debug)]
pub struct PiecewiseRadialMap {
    pub domain: Domain,
    pub roots: Vec<PackingNode>,
    pub a: Complex64,
    pub b: Complex64,
}

const GEOM_TOL: f64 = 1e-12;

/// Validates the nesting of `spec`, checks the requested class and returns
/// the evaluable map with identity root affine.
pub fn build_packing(spec: &PackingSpec, target: ClassTarget) -> Result<PiecewiseRadialMap> {
    spec.domain.validate()?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    check_siblings(&spec.nodes)?;
    let mut roots = Vec::with_capacity(spec.nodes.len());
    for n in &spec.nodes {
        let z0 = c(n.center);
        if spec.domain.clearance(z0) < n.outer - GEOM_TOL * (1.0 + n.outer) {
            return Err(Error::InvalidSpec(format!(
                "disk at {:?} with R = {} leaves the domain",
                n.center, n.outer
            )));
        }
        roots.push(build_node(n, one, zero, target)?);
    }
    if let ClassTarget::ApK { p, k } = target {
        if !(k >= 1.0 && p >= 2.0 && (k == 1.0 || p < 2.0 * k / (k - 1.0))) {
            return Err(Error::Class(format!(
                "A^p_K needs 2 <= p < 2K/(K-1) (p = {p}, K = {k})"
            )));
        }
    }
    Ok(PiecewiseRadialMap {
        domain: spec.domain,
        roots,
        a: one,
        b: zero,
    })
}

fn check_siblings(nodes: &[NodeSpec]) -> Result<()> {
    for n in nodes {
        if !(n.outer > 0.0 && n.r >= 0.0 && n.r < n.outer) {
            return Err(Error::InvalidSpec(format!("need 0 <= r < R at {:?}", n.center)));
        }
    }
    for (i, u) in nodes.iter().enumerate() {
        for v in &nodes[i + 1..] {
            let d = (c(u.center) - c(v.center)).norm();
            if d < u.outer + v.outer - GEOM_TOL * (1.0 + d) {
                return Err(Error::InvalidSpec(format!(
                    "disks at {:?} and {:?} overlap",
                    u.center, v.center
                )));
            }
        }
    }
    Ok(())
}

fn build_node(n: &NodeSpec, a: Complex64, b: Complex64, target: ClassTarget) -> Result<PackingNode> {
    let profile = n.profile()?;
    match target {
        ClassTarget::Any => {}
        ClassTarget::Ap { p } => {
            let cl = classify_profile(&profile, p, f64::INFINITY);
            if !(cl.expanding && cl.rho4 && cl.aa1) {
                return Err(Error::Class(format!(
                    "node at {:?} is not an expanding profile with the p = {p} bounds",
                    n.center
                )));
            }
        }
        ClassTarget::ApK { k, .. } => {
            let ok = match profile.kind() {
                ProfileKind::Power { exponent } => (exponent * k - 1.0).abs() < 1e-12,
                _ => false,
            };
            if !ok {
                return Err(Error::Class(format!(
                    "node at {:?} is not the K = {k} power profile",
                    n.center
                )));
            }
            if n.children.is_empty() && n.r > 0.0 {
                return Err(Error::Class(format!(
                    "terminal node at {:?} keeps a linear core",
                    n.center
                )));
            }
        }
    }
    if !n.children.is_empty() && n.r == 0.0 {
        return Err(Error::InvalidSpec(format!(
            "node at {:?} has children but no core",
            n.center
        )));
    }
    check_siblings(&n.children)?;
    let z0 = c(n.center);
    let mut node = PackingNode {
        center: z0,
        profile,
        a,
        b,
        children: Vec::new(),
    };
    if let Some((ca, cb)) = node.core_affine() {
        for ch in &n.children {
            let d = (c(ch.center) - z0).norm();
            if d + ch.outer > n.r + GEOM_TOL * (1.0 + n.r) {
                return Err(Error::InvalidSpec(format!(
                    "child at {:?} leaves the core of {:?}",
                    ch.center, n.center
                )));
            }
            node.children.push(build_node(ch, ca, cb, target)?);
        }
    }
    Ok(node)
}

impl PiecewiseRadialMap {
    pub fn identity(domain: Domain) -> Self {
        build_packing(&PackingSpec::empty(domain), ClassTarget::Any).unwrap()
    }

    pub fn region(&self, z: Complex64) -> Region<'_> {
        for n in &self.roots {
            if (z - n.center).norm() < n.outer() {
                return descend(n, z);
            }
        }
        Region::Linear { a: self.a, b: self.b }
    }

    /// `f(z)`; the root affine map outside the packed disks.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self.region(z) {
            Region::Linear { a, b } => a * z + b,
            Region::Annulus(n) => n.a * (n.center + n.profile.map(z - n.center)) + n.b,
        }
    }

    pub fn deriv(&self, z: Complex64) -> Result<PlanarDeriv> {
        match self.region(z) {
            Region::Linear { a, .. } => Ok(PlanarDeriv::conformal(a)),
            Region::Annulus(n) => {
                let d = radial_deriv(&n.profile, z - n.center)?;
                Ok(PlanarDeriv::new(n.a * d.dz, n.a * d.dzbar))
            }
        }
    }

    pub fn beltrami(&self, z: Complex64) -> Result<Complex64> {
        let d = self.deriv(z)?;
        Ok(d.beltrami().unwrap_or(Complex64::new(0.0, 0.0)))
    }

    pub fn nodes(&self) -> Vec<&PackingNode> {
        fn walk<'a>(n: &'a PackingNode, out: &mut Vec<&'a PackingNode>) {
            out.push(n);
            for ch in &n.children {
                walk(ch, out);
            }
        }
        let mut out = Vec::new();
        for n in &self.roots {
            walk(n, &mut out);
        }
        out
    }

    pub fn class_tags(&self, p: f64, k: f64) -> ClassTags {
        let nodes = self.nodes();
        let cls: Vec<_> = nodes.iter().map(|n| classify_profile(&n.profile, p, k)).collect();
        let in_ap = cls.iter().all(|c| c.expanding && c.rho4 && c.aa1);
        let in_apk = p >= 2.0
            && (k == 1.0 || p < 2.0 * k / (k - 1.0))
            && nodes.iter().all(|n| {
                matches!(n.profile.kind(), ProfileKind::Power { exponent } if (exponent * k - 1.0).abs() < 1e-12)
                    && (!n.children.is_empty() || n.inner() == 0.0)
            });
        ClassTags {
            expanding: cls.iter().all(|c| c.expanding),
            compressing: cls.iter().all(|c| c.compressing),
            in_ap,
            in_apk,
        }
    }

    /// Linear regions as (enclosing disk or whole domain, children, affine slope).
    fn linear_regions(&self) -> Vec<LinearRegion<'_>> {
        let mut out = vec![LinearRegion {
            enclosing: None,
            holes: &self.roots,
            a: self.a,
        }];
        for n in self.nodes() {
            if let Some((a, _)) = n.core_affine() {
                out.push(LinearRegion {
                    enclosing: Some((n.center, n.inner())),
                    holes: &n.children,
                    a,
                });
            }
        }
        out
    }

    /// `∫_Ω G(|f_z|, |f_z̄|)` for an isotropic density `G`: radial parts by
    /// one-dimensional quadrature in `t`, linear parts by exact areas.
    pub fn integrate<G: Fn(f64, f64) -> f64>(&self, g: G, tol: f64) -> Integral {
        let mut total = Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
        for reg in self.linear_regions() {
            let area = match reg.enclosing {
                None => self.domain.area(),
                Some((_, r)) => PI * r * r,
            } - reg.holes.iter().map(|h| PI * h.outer() * h.outer()).sum::<f64>();
            total.value += g(reg.a.norm(), 0.0) * area.max(0.0);
        }
        for n in self.nodes() {
            let s = n.a.norm();
            let prof = &n.profile;
            let mut f = |t: f64| {
                let (rho, d) = prof.eval(t);
                2.0 * PI * t * g(0.5 * s * (d + rho / t).abs(), 0.5 * s * (d - rho / t).abs())
            };
            let part = prof.integrate_annulus(&mut f, tol);
            total.value += part.value;
            total.error += part.error;
            total.converged &= part.converged;
        }
        total
    }

    /// Closed-form Burkholder energy `∫_Ω B_p(Df)` for expanding packings.
    pub fn energy_analytic(&self, p: f64) -> Result<f64> {
        let mut total = 0.0;
        for reg in self.linear_regions() {
            let area = match reg.enclosing {
                None => self.domain.area(),
                Some((_, r)) => PI * r * r,
            } - reg.holes.iter().map(|h| PI * h.outer() * h.outer()).sum::<f64>();
            total += reg.a.norm().powf(p) * area;
        }
        for n in self.nodes() {
            total += n.a.norm().powf(p) * annulus_energy(&n.profile, p)?;
        }
        Ok(total)
    }

    /// Burkholder energy with annuli in closed form and linear regions summed
    /// over the cells of an `n × n` grid on the domain's bounding box, cells
    /// weighted by exact disk overlaps.
    pub fn energy_on_grid(&self, p: f64, n: usize) -> Result<f64> {
        let [x0, x1, y0, y1] = self.domain.bounds();
        let hx = (x1 - x0) / n as f64;
        let hy = (y1 - y0) / n as f64;
        let cell = |i: usize, j: usize| (x0 + i as f64 * hx, y0 + j as f64 * hy);
        let disk_sum = |z0: Complex64, r: f64| {
            let i0 = (((z0.re - r - x0) / hx).floor().max(0.0) as usize).min(n);
            let i1 = (((z0.re + r - x0) / hx).ceil().max(0.0) as usize).min(n);
            let j0 = (((z0.im - r - y0) / hy).floor().max(0.0) as usize).min(n);
            let j1 = (((z0.im + r - y0) / hy).ceil().max(0.0) as usize).min(n);
            let mut s = 0.0;
            for j in j0..j1 {
                for i in i0..i1 {
                    let (a, b) = cell(i, j);
                    s += crate::quadrature::disk_rect_overlap(z0.re, z0.im, r, a, a + hx, b, b + hy);
                }
            }
            s
        };
        let mut total = 0.0;
        for reg in self.linear_regions() {
            let mut area = match reg.enclosing {
                None => match self.domain {
                    Domain::Disk { center, radius } => disk_sum(c(center), radius),
                    Domain::Rect { .. } => hx * hy * (n * n) as f64,
                },
                Some((z0, r)) => disk_sum(z0, r),
            };
            for h in reg.holes {
                area -= disk_sum(h.center, h.outer());
            }
            total += reg.a.norm().powf(p) * area;
        }
        for node in self.nodes() {
            total += node.a.norm().powf(p) * annulus_energy(&node.profile, p)?;
        }
        Ok(total)
    }

    /// Samples `f`, `f_z`, `f_z̄` or `μ` at the cell centres of a grid.
    pub fn sample(&self, spec: GridSpec, what: MapField) -> GridField {
        GridField::from_fn(spec, |z| match what {
            MapField::Map => self.eval(z),
            _ => match self.deriv(z) {
                Ok(d) => match what {
                    MapField::Dz => d.dz,
                    MapField::Dzbar => d.dzbar,
                    _ => d.beltrami().unwrap_or_default(),
                },
                // The origin of an r = 0 core: use the nearest regular value.
                Err(_) => Complex64::new(0.0, 0.0),
            },
        })
    }
}

struct LinearRegion<'a> {
    enclosing: Option<(Complex64, f64)>,
    holes: &'a [PackingNode],
    a: Complex64,
}

/// Field selector for [`PiecewiseRadialMap::sample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapField {
    Map,
    Dz,
    Dzbar,
    Beltrami,
}

fn descend(n: &PackingNode, z: Complex64) -> Region<'_> {
    let t = (z - n.center).norm();
    if let Some((a, b)) = n.core_affine() {
        if t < n.inner() {
            for ch in &n.children {
                if (z - ch.center).norm() < ch.outer() {
                    return descend(ch, z);
                }
            }
            return Region::Linear { a, b };
        }
    }
    Region::Annulus(n)
}

/// `π [ρ^p t^{2−p}]` over the annulus `r < t < R` of one profile.
pub fn annulus_energy(profile: &RadialProfile, p: f64) -> Result<f64> {
    let e = closed_form_energy(profile, p)?;
    Ok(match profile.core_slope() {
        Some(s) => e.outer_term - PI * s.powf(p) * profile.inner().powi(2),
        None => e.value,
    })
}

/// Random expanding packing of depth at most `depth` whose profiles obey
/// `ρ/t ≥ ρ̇ ≥ (1 − 2/p) ρ/t` and the origin condition at exponent `p`.
pub fn random_packing<R: Rng>(rng: &mut R, domain: Domain, p: f64, depth: usize) -> PackingSpec {
    let beta = 1.0 - 2.0 / p;
    let [x0, x1, y0, y1] = domain.bounds();
    let scale = (x1 - x0).min(y1 - y0);
    let count = rng.gen_range(1..=4);
    let mut nodes: Vec<NodeSpec> = Vec::new();
    let mut attempts = 0;
    while nodes.len() < count && attempts < 200 {
        attempts += 1;
        let z = Complex64::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if !domain.contains(z) {
            continue;
        }
        let mut room = domain.clearance(z);
        for n in &nodes {
            room = room.min((z - c(n.center)).norm() - n.outer);
        }
        if room < 0.08 * scale {
            continue;
        }
        let outer = room * rng.gen_range(0.6..0.98);
        nodes.push(random_node(rng, z, outer, beta, depth));
    }
    PackingSpec { domain, nodes }
}

fn random_node<R: Rng>(rng: &mut R, z: Complex64, outer: f64, beta: f64, depth: usize) -> NodeSpec {
    let with_core = depth > 1 || rng.gen_bool(0.5);
    let r = if with_core {
        outer * rng.gen_range(0.25..0.7)
    } else {
        0.0
    };
    let mut node = if rng.gen_bool(0.5) {
        // ρ_K with 1/K ≥ β, strictly above β when there is no core.
        let s_min = beta.max(0.0);
        let s = s_min + (1.0 - s_min) * rng.gen_range(0.05..1.0);
        NodeSpec::power(z, outer, r, 1.0 / s)
    } else {
        random_table_node(rng, z, outer, r, beta)
    };
    if depth > 1 && r > 0.0 {
        let k = rng.gen_range(1..=2);
        for _ in 0..k {
            // A child in the core avoiding its siblings.
            for _ in 0..50 {
                let off = Complex64::from_polar(r * rng.gen_range(0.0..0.6), rng.gen_range(0.0..2.0 * PI));
                let zc = z + off;
                let mut room = r - off.norm();
                for ch in &node.children {
                    room = room.min((zc - c(ch.center)).norm() - ch.outer);
                }
                if room > 0.15 * r {
                    let outer = room * rng.gen_range(0.6..0.98);
                    let child = random_node(rng, zc, outer, beta, depth - 1);
                    node.children.push(child);
                    break;
                }
            }
        }
    }
    node
}

fn random_table_node<R: Rng>(rng: &mut R, z: Complex64, outer: f64, r: f64, beta: f64) -> NodeSpec {
    let pieces = rng.gen_range(2..=4);
    let lo_t = if r > 0.0 { r } else { 0.2 * outer };
    let mut ts: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(lo_t..outer)).collect();
    ts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ts.retain(|t| *t > lo_t + 1e-3 * outer && *t < outer * (1.0 - 1e-3));
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * outer);
    ts.push(lo_t);
    let mut knots = vec![[outer, outer]];
    let b = beta.max(0.0);
    for t in ts {
        let [t1, r1] = *knots.last().unwrap();
        if t >= t1 {
            continue;
        }
        let lo = r1 * t / t1;
        let hi = r1 / (1.0 + b * (t1 - t) / t);
        knots.push([t, lo + rng.gen_range(0.0..1.0) * (hi - lo)]);
    }
    if r == 0.0 {
        knots.push([0.0, 0.0]);
    }
    knots.reverse();
    NodeSpec {
        center: [z.re, z.im],
        outer,
        r,
        kind: KindSpec::Table,
        k: None,
        exponent: None,
        knots,
        children: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::burkholder_p;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_power(k: f64, r: f64) -> PackingSpec {
        PackingSpec {
            domain: Domain::unit_disk(),
            nodes: vec![NodeSpec::power(z(0.0, 0.0), 1.0, r, k)],
        }
    }

    #[test]
    fn empty_packing_is_identity() {
        let f = build_packing(&PackingSpec::empty(Domain::unit_disk()), ClassTarget::Any).unwrap();
        assert_eq!(f.eval(z(0.3, 0.2)), z(0.3, 0.2));
        assert!((f.energy_analytic(3.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn single_power_node() {
        let f = build_packing(&single_power(2.0, 0.0), ClassTarget::Ap { p: 3.0 }).unwrap();
        let w = z(0.36, 0.0);
        assert!((f.eval(w) - z(0.6, 0.0)).norm() < 1e-15);
        assert!((f.energy_analytic(3.0).unwrap() - PI).abs() < 1e-14);
        let i = f.integrate(
            |a, b| burkholder_p(&PlanarDeriv::new(z(a, 0.0), z(b, 0.0)), 3.0).unwrap(),
            1e-12,
        );
        assert!((i.value - PI).abs() < 1e-9, "{}", i.value);
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{
            "domain": {"shape": "disk", "center": [0, 0], "radius": 1},
            "nodes": [{"center": [0.1, 0], "R": 0.8, "r": 0.4, "kind": "power", "K": 2,
                       "children": [{"center": [0.1, 0.1], "R": 0.2, "kind": "identity"}]}]
        }"#;
        let spec = PackingSpec::from_json(json).unwrap();
        assert_eq!(spec.depth(), 2);
        let back = PackingSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
        build_packing(&spec, ClassTarget::Any).unwrap();
    }

    #[test]
    fn invalid_specs() {
        let mut s = single_power(2.0, 0.0);
        s.nodes[0].outer = 1.2;
        assert!(matches!(
            build_packing(&s, ClassTarget::Any),
            Err(Error::InvalidSpec(_))
        ));
        let mut s = PackingSpec::empty(Domain::unit_disk());
        s.nodes.push(NodeSpec::power(z(-0.3, 0.0), 0.4, 0.0, 2.0));
        s.nodes.push(NodeSpec::power(z(0.3, 0.0), 0.4, 0.0, 2.0));
        assert!(matches!(
            build_packing(&s, ClassTarget::Any),
            Err(Error::InvalidSpec(_))
        ));
        let mut s = single_power(2.0, 0.5);
        s.nodes[0].children.push(NodeSpec::power(z(0.3, 0.0), 0.3, 0.0, 2.0));
        assert!(matches!(
            build_packing(&s, ClassTarget::Any),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn class_mismatch() {
        // K = 3 has 1/K < 1 − 2/p at p = 4.
        let s = single_power(3.0, 0.0);
        assert!(matches!(
            build_packing(&s, ClassTarget::Ap { p: 4.0 }),
            Err(Error::Class(_))
        ));
        let s = single_power(2.0, 0.3);
        assert!(matches!(
            build_packing(&s, ClassTarget::ApK { p: 3.0, k: 2.0 }),
            Err(Error::Class(_))
        ));
        let s = single_power(2.0, 0.0);
        assert!(build_packing(&s, ClassTarget::ApK { p: 3.0, k: 2.0 }).is_ok());
        assert!(build_packing(&s, ClassTarget::ApK { p: 4.0, k: 2.0 }).is_err());
    }

    fn two_level() -> PiecewiseRadialMap {
        let mut s = single_power(2.0, 0.5);
        let mut child = NodeSpec::power(z(0.1, -0.1), 0.3, 0.1, 1.5);
        child.children.push(NodeSpec::power(z(0.12, -0.08), 0.05, 0.0, 1.5));
        s.nodes[0].children.push(child);
        build_packing(&s, ClassTarget::Ap { p: 3.0 }).unwrap()
    }

    #[test]
    fn map_is_continuous_across_circles() {
        let f = two_level();
        for n in f.nodes() {
            for th in [0.0, 1.0, 2.5, 4.0] {
                for rad in [n.outer(), n.inner()] {
                    let u = Complex64::from_polar(1.0, th);
                    let a = f.eval(n.center + u * rad * (1.0 - 1e-9));
                    let b = f.eval(n.center + u * rad * (1.0 + 1e-9));
                    assert!((a - b).norm() < 1e-7, "{a} {b}");
                }
            }
        }
        // Identity on the boundary of Ω.
        let w = Complex64::from_polar(1.0 - 1e-12, 0.7);
        assert!((f.eval(w) - w).norm() < 1e-10);
    }

    #[test]
    fn energy_is_domain_area() {
        let f = two_level();
        for p in [2.0, 2.5, 3.0] {
            assert!((f.energy_analytic(p).unwrap() - PI).abs() < 1e-12);
            assert!((f.energy_on_grid(p, 256).unwrap() - PI).abs() < 1e-10);
        }
    }

    #[test]
    fn midpoint_grid_energy_oracle() {
        // Independent 2D midpoint quadrature of B_p(Df) on a packing whose
        // profiles all have cores, so the density is bounded.
        let mut s = single_power(2.0, 0.5);
        s.nodes[0].children.push(NodeSpec::power(z(0.1, -0.1), 0.3, 0.1, 1.5));
        let f = build_packing(&s, ClassTarget::Ap { p: 3.0 }).unwrap();
        let n = 1200;
        let h = 2.0 / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x0 = -1.0 + i as f64 * h;
                let y0 = -1.0 + j as f64 * h;
                let w = crate::quadrature::disk_rect_overlap(0.0, 0.0, 1.0, x0, x0 + h, y0, y0 + h);
                if w > 0.0 {
                    let d = f.deriv(z(x0 + 0.5 * h, y0 + 0.5 * h)).unwrap();
                    sum += w * burkholder_p(&d, 3.0).unwrap();
                }
            }
        }
        assert!((sum - PI).abs() < 5e-3 * PI, "{sum}");
    }

    #[test]
    fn random_packings_are_valid_ap_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..20 {
            let domain = if i % 2 == 0 {
                Domain::unit_disk()
            } else {
                Domain::Rect {
                    x0: -1.0,
                    x1: 1.0,
                    y0: -0.5,
                    y1: 0.5,
                }
            };
            let spec = random_packing(&mut rng, domain, 3.0, 3);
            assert!(spec.depth() <= 3 && !spec.nodes.is_empty());
            let f = build_packing(&spec, ClassTarget::Ap { p: 3.0 }).unwrap();
            assert!(f.class_tags(3.0, 2.0).in_ap);
            for p in [2.5, 3.0] {
                let e = f.energy_analytic(p).unwrap();
                assert!((e - domain.area()).abs() < 1e-11 * domain.area(), "{e}");
            }
        }
    }

    #[test]
    fn rho4_profiles_have_nonnegative_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = random_packing(&mut rng, Domain::unit_disk(), 3.0, 3);
        let f = build_packing(&spec, ClassTarget::Ap { p: 3.0 }).unwrap();
        for _ in 0..5000 {
            let w = z(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if let Ok(d) = f.deriv(w) {
                assert!(burkholder_p(&d, 3.0).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn integrate_matches_closed_form_energy() {
        let f = two_level();
        let i = f.integrate(
            |a, b| burkholder_p(&PlanarDeriv::new(z(a, 0.0), z(b, 0.0)), 2.5).unwrap(),
            1e-12,
        );
        assert!(i.converged);
        assert!((i.value - PI).abs() < 1e-9);
    }
}
