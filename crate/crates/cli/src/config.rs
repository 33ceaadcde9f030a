//! Run configuration: a single JSON document plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use strata_lgt::Tolerances;

use crate::CliError;

/// A spin cutoff, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JMax(pub u32);

impl FromStr for JMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let value = match s.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| format!("bad j_max {s:?}"))?;
                match den.trim() {
                    "2" => return Ok(JMax(num)),
                    "1" => num as f64,
                    _ => return Err(format!("j_max {s:?} must be a half-integer")),
                }
            }
            None => s.parse::<f64>().map_err(|_| format!("bad j_max {s:?}"))?,
        };
        JMax::from_value(value)
    }
}

impl JMax {
    fn from_value(v: f64) -> Result<Self, String> {
        let twice = 2.0 * v;
        if !(v >= 0.0) || (twice - twice.round()).abs() > 1e-12 {
            return Err(format!("j_max {v} must be a non-negative half-integer"));
        }
        Ok(JMax(twice.round() as u32))
    }
}

impl fmt::Display for JMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for JMax {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for JMax {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => JMax::from_value(v),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    /// Number of sampled points when no explicit points are given.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// `torus_sector`, `generic` or `vertex`.
    #[serde(default)]
    pub mode: Option<String>,
    /// Explicit points; sampling is skipped when present.
    #[serde(default)]
    pub points: Option<Vec<PointSpec>>,
}

fn default_samples() -> usize {
    100
}

impl Default for ClassifySpec {
    fn default() -> Self {
        Self { samples: default_samples(), mode: None, points: None }
    }
}

/// `[re, im]` entries of a 2×2 matrix in row-major order.
pub type MatrixSpec = [[f64; 2]; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub a: MatrixSpec,
    #[serde(rename = "A")]
    pub big_a: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    /// A vertex `(ν_1𝟙, …)` with zero momenta, written like `"+-"`.
    Vertex {
        vertex: String,
    },
    Links {
        links: Vec<LinkSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TprocSpec {
    /// Constraint file, relative to the configuration file.
    pub constraints: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    /// Check the Gram matrix by Haar quadrature.
    #[serde(default = "yes")]
    pub check_gram: bool,
}

fn yes() -> bool {
    true
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self { check_gram: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Explicit couplings; take precedence over `lambda_grid`.
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    /// Logarithmic coupling grid.
    #[serde(default)]
    pub lambda_grid: Option<GridSpec>,
    /// Values of s = ħβ² for the overlap table.
    #[serde(default)]
    pub s_grid: Option<Vec<f64>>,
}

pub const DEFAULT_N_MAX: usize = 60;
pub const DEFAULT_LAMBDA_GRID: GridSpec = GridSpec { min: 0.5, max: 10.0, points: 40 };
pub const DEFAULT_S_GRID: [f64; 6] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N", alias = "n", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub j_max: Option<JMax>,
    pub hbar: f64,
    pub beta: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Basis cache file; defaults to `basis.bin` in the output directory.
    #[serde(default)]
    pub basis_cache: Option<PathBuf>,
    #[serde(default)]
    pub classify: ClassifySpec,
    #[serde(default)]
    pub tproc: Option<TprocSpec>,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jmax: Option<JMax>,
    pub n: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(t) = &mut config.tproc {
            if t.constraints.is_relative() {
                t.constraints = base.join(&t.constraints);
            }
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(out) = &overrides.out {
            config.output_dir = Some(out.clone());
        }
        if let Some(j) = overrides.jmax {
            config.j_max = Some(j);
        }
        if let Some(n) = overrides.n {
            config.n = Some(n);
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("hbar", self.hbar)?;
        positive("beta", self.beta)?;
        if let Some(l) = self.lambda {
            positive("lambda", l)?;
        }
        if let Some(d) = self.delta {
            positive("delta", d)?;
        }
        if self.n == Some(0) {
            return Err(CliError::Config("N must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Config("N is required (config field \"N\" or --n)".into()))
    }

    pub fn j_max(&self) -> Result<JMax, CliError> {
        self.j_max.ok_or_else(|| CliError::Config("j_max is required (config field \"j_max\" or --jmax)".into()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("strata-lgt-out"))
    }

    pub fn basis_cache(&self) -> PathBuf {
        self.basis_cache.clone().unwrap_or_else(|| self.output_dir().join("basis.bin"))
    }

    /// Canonical JSON of the effective configuration, without storage locations.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.basis_cache = None;
        serde_json::to_string(&c).expect("configuration serializes")
    }
}
