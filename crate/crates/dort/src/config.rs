//! Experiment configuration: TOML ingestion, defaults and validation.
//!
//! Grammar (all keys optional unless marked):
//!
//! ```toml
//! name = "my-scene"
//! engine = "mie"            # mie | bem | asymptotic
//! n_directions = 360
//! noise_level = 0.05        # relative Frobenius norm of the added noise
//! seed = 0                  # 0 ..= 2^63 - 1 (TOML integers are signed)
//! spectrum = "table"        # table | weighted
//! outputs = "out"
//! bem_points = 128          # Nystrom nodes per body
//! coupled = false           # bem only: one system for all bodies
//! map_csv = true            # raw CSV per map besides the PGM
//!
//! [medium]
//! lambda = 1.0
//! mu = 2.0
//! omega = 2.0
//!
//! [[cavities]]              # at least one (required)
//! shape = "disk"            # disk | peanuthull, or a [cavities.fourier] table
//! center = [5.0, 0.0]
//! scale = 0.002             # radius for disks
//!
//! [[aperture]]              # omitted: full circle
//! start = 0.785398
//! end = 2.356194
//!
//! [imaging]
//! x_min = -15.0
//! x_max = 15.0
//! y_min = -15.0
//! y_max = 15.0
//! step = 0.1
//! ```
//!
//! A Fourier shape replaces `shape`:
//! `fourier = { a0 = 2.0, cos = [0.0], sin = [0.0, 1.0] }` gives
//! `r(t) = a0 + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)`.

use std::path::PathBuf;

use dort_core::boundary::RadialShape;
use dort_core::dort::{Arc, Cavity};
use dort_core::elastic::ElasticMedium;
use dort_core::imaging::GridSpec;
use dort_core::mie::DiskCavity;
use dort_core::Vec2;
use serde::{Deserialize, Serialize};

pub const DEFAULT_DIRECTIONS: usize = 360;
pub const DEFAULT_NOISE: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Semantic { field: String, message: String },
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Semantic { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Mie,
    Bem,
    Asymptotic,
}

impl EngineKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "mie" => Some(Self::Mie),
            "bem" => Some(Self::Bem),
            "asymptotic" => Some(Self::Asymptotic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mie => "mie",
            Self::Bem => "bem",
            Self::Asymptotic => "asymptotic",
        }
    }
}

/// Scale of the reported eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumScale {
    /// Plain sample-matrix product times `64 n^2 / pi`.
    Table,
    /// Eigenvalues of the time-reversal operator in the weighted space.
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub medium: ElasticMedium,
    pub cavities: Vec<Cavity>,
    pub engine: EngineKind,
    pub bem_points: usize,
    pub coupled: bool,
    pub n_directions: usize,
    pub noise_level: f64,
    pub seed: u64,
    /// Empty means the full circle.
    pub aperture: Vec<Arc>,
    pub imaging: GridSpec,
    pub spectrum: SpectrumScale,
    pub outputs: PathBuf,
    /// Write the raw CSV of every map; the PGM is always written.
    pub map_csv: bool,
}

impl ExperimentConfig {
    /// Defaults around the given cavities.
    pub fn new(name: &str, cavities: Vec<Cavity>) -> Self {
        Self {
            name: name.into(),
            medium: ElasticMedium::new(1.0, 2.0, 2.0).expect("default medium"),
            cavities,
            engine: EngineKind::Mie,
            bem_points: 128,
            coupled: false,
            n_directions: DEFAULT_DIRECTIONS,
            noise_level: DEFAULT_NOISE,
            seed: DEFAULT_SEED,
            aperture: Vec::new(),
            imaging: GridSpec::square(15.0, 0.1),
            spectrum: SpectrumScale::Table,
            outputs: PathBuf::from("out"),
            map_csv: true,
        }
    }

    /// Checks the cross-field constraints.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cavities.is_empty() {
            return Err(ConfigError::field("cavities", "at least one cavity is required"));
        }
        if self.engine == EngineKind::Mie {
            if let Some(k) = self.cavities.iter().position(|c| !matches!(c, Cavity::Disk(_))) {
                return Err(ConfigError::field(format!("cavities[{k}]"), "the mie engine handles disks only; use engine = \"bem\""));
            }
        }
        if self.coupled && self.engine != EngineKind::Bem {
            return Err(ConfigError::field("coupled", "only the bem engine supports coupled bodies"));
        }
        if self.n_directions < 4 {
            return Err(ConfigError::field("n_directions", "need at least 4 directions"));
        }
        if self.bem_points < 8 || !self.bem_points.is_multiple_of(2) {
            return Err(ConfigError::field("bem_points", "need an even count of at least 8"));
        }
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return Err(ConfigError::field("noise_level", "must be finite and nonnegative"));
        }
        if self.imaging.axes().is_err() {
            return Err(ConfigError::field("imaging", "need step > 0 and min <= max on both axes"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    engine: Option<String>,
    n_directions: Option<i64>,
    noise_level: Option<f64>,
    seed: Option<i64>,
    spectrum: Option<String>,
    outputs: Option<String>,
    bem_points: Option<i64>,
    coupled: Option<bool>,
    map_csv: Option<bool>,
    medium: Option<RawMedium>,
    #[serde(default)]
    cavities: Vec<RawCavity>,
    aperture: Option<Vec<RawArc>>,
    imaging: Option<RawGrid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    lambda: f64,
    mu: f64,
    omega: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    shape: Option<String>,
    fourier: Option<RawFourier>,
    center: [f64; 2],
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFourier {
    a0: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    start: f64,
    end: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    step: f64,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn cavity(raw: RawCavity, k: usize) -> Result<Cavity, ConfigError> {
    let field = |f: &str| format!("cavities[{k}].{f}");
    let center = Vec2::new(raw.center[0], raw.center[1]);
    if !(center.x.is_finite() && center.y.is_finite()) {
        return Err(ConfigError::field(field("center"), "must be finite"));
    }
    if !(raw.scale.is_finite() && raw.scale > 0.0) {
        return Err(ConfigError::field(field("scale"), "must be positive"));
    }
    let shape = match (raw.shape.as_deref(), raw.fourier) {
        (Some(_), Some(_)) => return Err(ConfigError::field(field("shape"), "give either `shape` or `fourier`, not both")),
        (None, None) => return Err(ConfigError::field(field("shape"), "missing; give `shape` or `fourier`")),
        (Some("disk"), None) => {
            let d = DiskCavity::new(center, raw.scale).map_err(|e| ConfigError::field(field("scale"), e.to_string()))?;
            return Ok(Cavity::Disk(d));
        }
        (Some("peanuthull"), None) => RadialShape::peanuthull(),
        (Some(other), None) => return Err(ConfigError::field(field("shape"), format!("unknown preset `{other}` (expected disk or peanuthull)"))),
        (None, Some(f)) => RadialShape::fourier(f.a0, f.cos, f.sin).map_err(|e| ConfigError::field(field("fourier"), e.to_string()))?,
    };
    Ok(Cavity::Smooth { shape, center, scale: raw.scale })
}

/// Parses and validates a TOML experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Syntax { line, column, message: e.message().trim().to_string() }
    })?;
    let cavities = raw.cavities.into_iter().enumerate().map(|(k, c)| cavity(c, k)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = ExperimentConfig::new(raw.name.as_deref().unwrap_or("custom"), cavities);
    if let Some(m) = raw.medium {
        cfg.medium = ElasticMedium::new(m.lambda, m.mu, m.omega).map_err(|e| ConfigError::field("medium", e.to_string()))?;
    }
    if let Some(e) = raw.engine {
        cfg.engine = EngineKind::parse(&e).ok_or_else(|| ConfigError::field("engine", format!("unknown engine `{e}` (expected mie, bem or asymptotic)")))?;
    }
    if let Some(n) = raw.n_directions {
        cfg.n_directions = usize::try_from(n).map_err(|_| ConfigError::field("n_directions", "must be positive"))?;
    }
    if let Some(n) = raw.bem_points {
        cfg.bem_points = usize::try_from(n).map_err(|_| ConfigError::field("bem_points", "must be positive"))?;
    }
    if let Some(v) = raw.noise_level {
        cfg.noise_level = v;
    }
    if let Some(s) = raw.seed {
        cfg.seed = u64::try_from(s).map_err(|_| ConfigError::field("seed", "must be nonnegative"))?;
    }
    if let Some(c) = raw.coupled {
        cfg.coupled = c;
    }
    if let Some(c) = raw.map_csv {
        cfg.map_csv = c;
    }
    if let Some(s) = raw.spectrum {
        cfg.spectrum = match s.as_str() {
            "table" => SpectrumScale::Table,
            "weighted" => SpectrumScale::Weighted,
            _ => return Err(ConfigError::field("spectrum", format!("unknown scale `{s}` (expected table or weighted)"))),
        };
    }
    if let Some(o) = raw.outputs {
        cfg.outputs = PathBuf::from(o);
    }
    if let Some(arcs) = raw.aperture {
        cfg.aperture = arcs
            .iter()
            .enumerate()
            .map(|(k, a)| Arc::new(a.start, a.end).map_err(|e| ConfigError::field(format!("aperture[{k}]"), e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    if let Some(g) = raw.imaging {
        cfg.imaging = GridSpec { x_min: g.x_min, x_max: g.x_max, y_min: g.y_min, y_max: g.y_max, step: g.step };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `a,b;c,d` into arcs (radians).
pub fn parse_aperture(text: &str) -> Result<Vec<Arc>, ConfigError> {
    let bad = |m: String| ConfigError::field("aperture", m);
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let v: Vec<&str> = pair.split(',').map(str::trim).collect();
            let [a, b] = v.as_slice() else {
                return Err(bad(format!("`{pair}` is not a `start,end` pair")));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
            Arc::new(num(a)?, num(b)?).map_err(|e| bad(e.to_string()))
        })
        .collect()
}
