//! Run configuration: a TOML or JSON file plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::fermi::FermiContext;
use crate::potential::{Differentiation, Potential};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("bad override {0:?}: expected key=value")]
    Override(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Kodm,
    Gvodm,
    WkSymmetric,
    LaplaceRoute,
    Exact,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kodm => "kodm",
            Self::Gvodm => "gvodm",
            Self::WkSymmetric => "wk-symmetric",
            Self::LaplaceRoute => "laplace-route",
            Self::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    /// First axes are `r`, second axes `r'`.
    PairPoints,
    /// First axes are `R`, second axes `s`.
    SymmetricPoints,
    /// First axes only, `r = r'`.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Equispaced values; a single point sits at `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub mode: GridMode,
    pub first: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub second: Vec<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextConfig {
    pub d: usize,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
    pub mu: f64,
    #[serde(default = "one_u32")]
    pub g: u32,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialModel {
    Zero,
    Harmonic {
        #[serde(default = "one")]
        mass: f64,
        omega: f64,
    },
    AnisotropicHarmonic {
        #[serde(default = "one")]
        mass: f64,
        omegas: Vec<f64>,
    },
    Quartic {
        lambda: f64,
    },
    GaussianWell {
        depth: f64,
        width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferentiationMode {
    #[default]
    Analytic,
    Central,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    #[serde(flatten)]
    pub model: PotentialModel,
    #[serde(default)]
    pub differentiation: DifferentiationMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub methods: [Method; 2],
    /// When set, `compare` exits 1 if any relative difference exceeds it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "yes")]
    pub header_time: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: None, format: Format::Csv, header_time: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub context: ContextConfig,
    pub potential: PotentialConfig,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub skip_forbidden: bool,
}

fn default_method() -> Method {
    Method::Gvodm
}

/// Reads a file as a JSON tree; `.json` files are JSON, anything else TOML.
pub fn read_tree(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    let parse = |message: String| ConfigError::Parse { path: path.into(), message };
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| parse(e.to_string()))
    } else {
        let v: toml::Value = toml::from_str(&text).map_err(|e| parse(e.to_string()))?;
        serde_json::to_value(v).map_err(|e| parse(e.to_string()))
    }
}

/// Applies `a.b.c=value`; the value is read as JSON when possible
/// (numbers, booleans, arrays) and as a plain string otherwise. Numeric
/// segments index into arrays.
pub fn apply_override(tree: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(assignment.to_string());
    let (key, raw) = assignment.split_once('=').ok_or_else(bad)?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(bad());
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = tree;
    for seg in key.split('.') {
        node = match node {
            Value::Array(items) => {
                let i: usize = seg.parse().map_err(|_| bad())?;
                items.get_mut(i).ok_or_else(bad)?
            }
            other => {
                if !other.is_object() {
                    *other = Value::Object(Default::default());
                }
                other.as_object_mut().unwrap().entry(seg).or_insert(Value::Null)
            }
        };
    }
    *node = value;
    Ok(())
}

impl RunConfig {
    pub fn from_tree(tree: Value) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_value(tree).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut tree = read_tree(path)?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        Self::from_tree(tree)
    }

    pub fn fermi_context(&self) -> Result<FermiContext, ConfigError> {
        let c = self.context;
        FermiContext::new(c.d, c.hbar, c.m, c.mu, c.g).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn build_potential(&self) -> Result<Potential, ConfigError> {
        let p = match &self.potential.model {
            PotentialModel::Zero => Ok(Potential::zero()),
            PotentialModel::Harmonic { mass, omega } => Potential::harmonic(*mass, *omega),
            PotentialModel::AnisotropicHarmonic { mass, omegas } => {
                Potential::anisotropic_harmonic(*mass, omegas.clone())
            }
            PotentialModel::Quartic { lambda } => Potential::quartic(*lambda),
            PotentialModel::GaussianWell { depth, width } => Potential::gaussian_well(*depth, *width),
        }
        .and_then(|p| match self.potential.differentiation {
            DifferentiationMode::Analytic => Ok(p),
            DifferentiationMode::Central => p.with_differentiation(Differentiation::central()),
        });
        p.map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Methods evaluated by `eval` (one) or `compare` (two).
    pub fn methods(&self, comparing: bool) -> Result<Vec<Method>, ConfigError> {
        if !comparing {
            return Ok(vec![self.method]);
        }
        match &self.compare {
            Some(c) => Ok(c.methods.to_vec()),
            None => invalid("compare needs a [compare] section with two methods"),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctx = self.fermi_context()?;
        let v = self.build_potential()?;
        if let Some(dim) = v.dimension() {
            if dim != ctx.d {
                return invalid(format!("potential is {dim}-dimensional but d = {}", ctx.d));
            }
        }
        let g = &self.grid;
        let want_second = g.mode != GridMode::Diagonal;
        if g.first.len() != ctx.d || (want_second && g.second.len() != ctx.d) {
            return invalid(format!(
                "grid needs {} axes in first{}",
                ctx.d,
                if want_second { " and second" } else { "" }
            ));
        }
        if !want_second && !g.second.is_empty() {
            return invalid("diagonal grids take no second axes");
        }
        for a in g.first.iter().chain(&g.second) {
            if a.count == 0 || !a.min.is_finite() || !a.max.is_finite() {
                return invalid(format!("axis {a:?} needs finite bounds and count >= 1"));
            }
        }
        let mut methods = vec![self.method];
        if let Some(c) = &self.compare {
            methods.extend(c.methods);
            if let Some(t) = c.tolerance {
                if !(t >= 0.0) {
                    return invalid("compare.tolerance must be nonnegative");
                }
            }
        }
        for m in methods {
            if m == Method::Exact {
                let ok = ctx.d == 1
                    && matches!(self.potential.model, PotentialModel::Harmonic { mass, .. } if mass == ctx.m);
                if !ok {
                    return invalid("method exact needs d = 1 and a harmonic potential with mass equal to context.m");
                }
            }
            if m == Method::LaplaceRoute && g.mode == GridMode::Diagonal {
                return invalid("laplace-route has no diagonal limit; use kodm or a nonzero separation");
            }
        }
        Ok(())
    }
}
