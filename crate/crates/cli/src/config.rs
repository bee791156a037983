//! Run configuration: a TOML document merged with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use burkholder::grid::GridSpec;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_BOX: f64 = 2.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_FAMILY_GRID: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Interpolation families run by `verify interpolation`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    All,
    Constant,
    Exponential,
    TwoPoint,
    Beltrami,
    Counterexample,
}

/// `KIND[:key=value,...]` description of a Beltrami coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MuSpec {
    Zero,
    /// `k χ_D`.
    Const {
        k: f64,
    },
    /// Radial coefficient with constant `α ≡ k`.
    Radial {
        k: f64,
    },
    /// Smooth random coefficient with `sup |μ| = k`.
    Random {
        k: f64,
    },
    /// Coefficient of a random bump map, the identity outside `D`.
    Bump {
        k: f64,
    },
}

impl MuSpec {
    pub fn k(&self) -> f64 {
        match self {
            MuSpec::Zero => 0.0,
            MuSpec::Const { k } | MuSpec::Radial { k } | MuSpec::Random { k } | MuSpec::Bump { k } => *k,
        }
    }
}

impl fmt::Display for MuSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuSpec::Zero => write!(f, "zero"),
            MuSpec::Const { k } => write!(f, "const:k={k}"),
            MuSpec::Radial { k } => write!(f, "radial:k={k}"),
            MuSpec::Random { k } => write!(f, "random:k={k}"),
            MuSpec::Bump { k } => write!(f, "bump:k={k}"),
        }
    }
}

impl FromStr for MuSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut k = None;
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value in mu parameters, got {part:?}"))?;
            match key.trim() {
                "k" => k = Some(value.trim().parse::<f64>().with_context(|| format!("bad k in {s:?}"))?),
                other => bail!("unknown mu parameter {other:?}"),
            }
        }
        let need = |k: Option<f64>| -> Result<f64> {
            let k = k.ok_or_else(|| anyhow!("mu kind {kind:?} needs k=..."))?;
            if !(0.0..1.0).contains(&k) {
                bail!("mu parameter k = {k} must lie in [0, 1)");
            }
            Ok(k)
        };
        Ok(match kind {
            "zero" => {
                if k.is_some() {
                    bail!("mu kind zero takes no parameters");
                }
                MuSpec::Zero
            }
            "const" => MuSpec::Const { k: need(k)? },
            "radial" => MuSpec::Radial { k: need(k)? },
            "random" => MuSpec::Random { k: need(k)? },
            "bump" => MuSpec::Bump { k: need(k)? },
            other => bail!("unknown mu kind {other:?} (expected zero, const, radial, random, bump)"),
        })
    }
}

/// Keys accepted in a configuration document; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub grid: Option<usize>,
    #[serde(rename = "box")]
    pub half_side: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub mu: Option<String>,
    pub packing: Option<PathBuf>,
    pub p: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub family: Option<Family>,
    pub family_grid: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Resolved configuration of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid: usize,
    #[serde(rename = "box")]
    pub half_side: f64,
    pub tol: f64,
    pub seed: u64,
    pub mu: Option<MuSpec>,
    pub packing: Option<PathBuf>,
    pub p: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Not serialized, so reports are identical across output directories.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub family: Family,
    pub family_grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: DEFAULT_GRID,
            half_side: DEFAULT_BOX,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            mu: None,
            packing: None,
            p: None,
            k: None,
            out: None,
            format: Format::Json,
            family: Family::All,
            family_grid: DEFAULT_FAMILY_GRID,
        }
    }
}

impl RunConfig {
    /// Flags win over the document, the document over defaults.
    pub fn merge(file: FileConfig, flags: FileConfig) -> Result<Self> {
        let d = RunConfig::default();
        let mu = match flags.mu.or(file.mu) {
            Some(s) => Some(s.parse()?),
            None => None,
        };
        let cfg = RunConfig {
            grid: flags.grid.or(file.grid).unwrap_or(d.grid),
            half_side: flags.half_side.or(file.half_side).unwrap_or(d.half_side),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            mu,
            packing: flags.packing.or(file.packing),
            p: flags.p.or(file.p),
            k: flags.k.or(file.k),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(d.format),
            family: flags.family.or(file.family).unwrap_or(d.family),
            family_grid: flags.family_grid.or(file.family_grid).unwrap_or(d.family_grid),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        GridSpec::new(self.grid, self.half_side).map_err(|e| anyhow!("--grid/--box: {e}"))?;
        GridSpec::new(self.family_grid, self.half_side).map_err(|e| anyhow!("family_grid: {e}"))?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("--tol must lie in (0, 1), got {}", self.tol);
        }
        if let Some(p) = self.p {
            if !p.is_finite() {
                bail!("--p must be finite");
            }
        }
        if let Some(k) = self.k {
            if !(k >= 1.0 && k.is_finite()) {
                bail!("--K must be a finite distortion >= 1, got {k}");
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.grid, self.half_side).expect("validated grid")
    }

    pub fn family_spec(&self) -> GridSpec {
        GridSpec::new(self.family_grid, self.half_side).expect("validated grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_specs_parse() {
        assert_eq!("zero".parse::<MuSpec>().unwrap(), MuSpec::Zero);
        assert_eq!("const:k=0.3".parse::<MuSpec>().unwrap(), MuSpec::Const { k: 0.3 });
        assert_eq!("radial:k=0.333".parse::<MuSpec>().unwrap(), MuSpec::Radial { k: 0.333 });
        assert!("const".parse::<MuSpec>().is_err());
        assert!("const:k=1".parse::<MuSpec>().is_err());
        assert!("spiral:k=0.1".parse::<MuSpec>().is_err());
        assert!("random:q=0.1".parse::<MuSpec>().is_err());
        for s in ["zero", "const:k=0.3", "bump:k=0.25"] {
            assert_eq!(s.parse::<MuSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn flags_override_document() {
        let file: FileConfig = toml::from_str("grid = 128\nseed = 3\nK = 2.0\nformat = \"csv\"").unwrap();
        let flags = FileConfig {
            seed: Some(9),
            ..FileConfig::default()
        };
        let cfg = RunConfig::merge(file, flags).unwrap();
        assert_eq!(cfg.grid, 128);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.k, Some(2.0));
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.half_side, DEFAULT_BOX);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(toml::from_str::<FileConfig>("gird = 128").is_err());
        let bad = FileConfig {
            grid: Some(100),
            ..FileConfig::default()
        };
        assert!(RunConfig::merge(FileConfig::default(), bad).is_err());
        let bad = FileConfig {
            k: Some(0.5),
            ..FileConfig::default()
        };
        assert!(RunConfig::merge(FileConfig::default(), bad).is_err());
    }
}
