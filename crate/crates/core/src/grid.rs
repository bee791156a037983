//! Uniform cell-centred grids on the square `[-L, L]²` and their binary
//! field format.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const MAGIC: &[u8; 4] = b"QCGF";
const VERSION: u32 = 1;

/// `N × N` cells covering `[-L, L]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    l: f64,
}

impl GridSpec {
    /// `n` must be a power of two no smaller than 64. The half-side must leave
    /// a margin of at least one around the unit disk.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return invalid(format!("grid size {n} must be a power of two >= 64"));
        }
        if !(l.is_finite() && l >= 2.0) {
            return invalid(format!("box half-side {l} must be >= 2"));
        }
        Ok(GridSpec { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_side(&self) -> f64 {
        self.l
    }

    /// Cell side `2L/N`.
    pub fn step(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.step() * self.step()
    }

    /// Centre coordinate of cell index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.l + (i as f64 + 0.5) * self.step()
    }

    /// Centre of the cell in `row` (y) and `col` (x).
    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        Complex64::new(self.coord(col), self.coord(row))
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The grid with half as many cells per axis, if still admissible.
    pub fn coarser(&self) -> Result<GridSpec> {
        GridSpec::new(self.n / 2, self.l)
    }

    /// Exact area of the cell at (`row`, `col`) inside the disk `|z - c| < radius`.
    pub fn disk_overlap(&self, row: usize, col: usize, c: Complex64, radius: f64) -> f64 {
        let h = self.step();
        let x0 = -self.l + col as f64 * h;
        let y0 = -self.l + row as f64 * h;
        crate::quadrature::disk_rect_overlap(c.re, c.im, radius, x0, x0 + h, y0, y0 + h)
    }

    /// Range of cell indices whose cells meet `[lo, hi]` along one axis.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let h = self.step();
        let a = ((lo + self.l) / h).floor().max(0.0) as usize;
        let b = (((hi + self.l) / h).ceil().max(0.0) as usize).min(self.n);
        a.min(self.n)..b
    }

    /// Cells meeting the closed disk, with their overlap areas.
    pub fn disk_cells(&self, c: Complex64, radius: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for row in self.index_range(c.im - radius, c.im + radius) {
            for col in self.index_range(c.re - radius, c.re + radius) {
                let w = self.disk_overlap(row, col, c, radius);
                if w > 0.0 {
                    out.push((row * self.n + col, w));
                }
            }
        }
        out
    }
}

/// Complex samples at the cell centres of a grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Self {
        GridField {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return invalid(format!("expected {} samples, got {}", spec.len(), values.len()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return invalid("field contains non-finite samples");
        }
        Ok(GridField { spec, values })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for row in 0..spec.n {
            for col in 0..spec.n {
                values.push(f(spec.point(row, col)));
            }
        }
        GridField { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.spec.n + col]
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> GridField {
        GridField {
            spec: self.spec,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GridField, mut f: impl FnMut(Complex64, Complex64) -> Complex64) -> GridField {
        debug_assert_eq!(self.spec, other.spec);
        GridField {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Discrete `L²` norm with cell weight `h²`.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Midpoint rule for the integral over the whole box.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spec.cell_area()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.spec.len() as f64
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.spec.n as u32).to_le_bytes())?;
        w.write_all(&self.spec.l.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 20];
        r.read_exact(&mut head)?;
        if &head[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let l = f64::from_le_bytes(head[12..20].try_into().unwrap());
        let spec = GridSpec::new(n, l).map_err(|e| Error::Format(e.to_string()))?;
        let mut buf = vec![0u8; 16 * spec.len()];
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated field data".into()))?;
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        GridField::from_values(spec, values).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        GridField::read_from(std::io::BufReader::new(f))
    }
}
