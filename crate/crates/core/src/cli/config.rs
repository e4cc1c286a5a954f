use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse;
use crate::geometry::arw::ARWSpec;
use crate::geometry::quadrature::{GridMode, QuadratureGrid};
use crate::limits::geometric_schedule;
use crate::sads::{as_arw_spec, SAdSParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Mass,
    Imcf,
    Check,
    SadsDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Mass => "mass",
            Command::Imcf => "imcf",
            Command::Check => "check",
            Command::SadsDemo => "sads-demo",
        }
    }
}

fn one() -> f64 {
    1.0
}

fn zero_expr() -> String {
    "0".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpacetimeConfig {
    Sads {
        n: usize,
        lambda: f64,
        mass: f64,
    },
    RwFamily {
        n: usize,
        omega: f64,
        k: f64,
        a: f64,
        #[serde(default = "one")]
        sphere_scale: f64,
    },
    Custom {
        n: usize,
        omega: f64,
        f: String,
        #[serde(default = "zero_expr")]
        psi: String,
        #[serde(default = "zero_expr")]
        lambda: String,
        a: f64,
        #[serde(default = "one")]
        sphere_scale: f64,
    },
}

impl SpacetimeConfig {
    pub fn build(&self) -> Result<ARWSpec> {
        match self {
            SpacetimeConfig::Sads { n, lambda, mass } => as_arw_spec(&SAdSParams::new(*n, *lambda, *mass)?),
            SpacetimeConfig::RwFamily { n, omega, k, a, sphere_scale } => {
                ARWSpec::rw_family(*n, *omega, *k, *a)?.with_sphere_scale(*sphere_scale)
            }
            SpacetimeConfig::Custom { n, omega, f, psi, lambda, a, sphere_scale } => {
                ARWSpec::new(*n, *omega, parse(f)?, parse(psi)?, parse(lambda)?, *a)?.with_sphere_scale(*sphere_scale)
            }
        }
    }

    pub fn sads_params(&self) -> Option<Result<SAdSParams>> {
        match self {
            SpacetimeConfig::Sads { n, lambda, mass } => Some(SAdSParams::new(*n, *lambda, *mass)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "GridConfig::default_nodes")]
    pub nodes: usize,
    #[serde(default = "GridConfig::default_mode")]
    pub mode: GridMode,
}

impl GridConfig {
    fn default_nodes() -> usize {
        24
    }

    fn default_mode() -> GridMode {
        GridMode::Axisymmetric
    }

    pub fn build(&self, n: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(n, self.nodes, self.mode)
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nodes: Self::default_nodes(), mode: Self::default_mode() }
    }
}

/// `τ_k = a·2^{−k}`, `k = 0..=K`; `a` defaults to the domain start.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default = "ScheduleConfig::default_k", rename = "K", alias = "k")]
    pub k: usize,
}

impl ScheduleConfig {
    fn default_k() -> usize {
        10
    }

    pub fn build(&self, spec: &ARWSpec) -> Result<Vec<f64>> {
        let a = self.a.unwrap_or(spec.domain_start());
        if !(a >= spec.domain_start() && a < 0.0) {
            return Err(Error::InvalidArgument(format!("schedule start {a} outside [{}, 0)", spec.domain_start())));
        }
        Ok(geometric_schedule(a, self.k))
    }
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { a: None, k: Self::default_k() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "Tolerances::default_ode")]
    pub ode: f64,
    #[serde(default = "Tolerances::default_mass_increment")]
    pub mass_increment: f64,
}

impl Tolerances {
    fn default_ode() -> f64 {
        crate::imcf::DEFAULT_TOLERANCE
    }

    fn default_mass_increment() -> f64 {
        crate::geometry::arw::MASS_INCREMENT_TOLERANCE
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ode: Self::default_ode(), mass_increment: Self::default_mass_increment() }
    }
}

/// Flow start `u0` (defaults to half the domain start) and end time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImcfConfig {
    #[serde(default)]
    pub u0: Option<f64>,
    #[serde(default = "ImcfConfig::default_t_end")]
    pub t_end: f64,
    /// Leaves on which the mass quantities are evaluated.
    #[serde(default = "ImcfConfig::default_leaves")]
    pub leaves: usize,
}

impl ImcfConfig {
    fn default_t_end() -> f64 {
        20.0
    }

    fn default_leaves() -> usize {
        64
    }
}

impl Default for ImcfConfig {
    fn default() -> Self {
        ImcfConfig { u0: None, t_end: Self::default_t_end(), leaves: Self::default_leaves() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TccConfig {
    #[serde(default = "TccConfig::default_events")]
    pub events: usize,
    #[serde(default = "TccConfig::default_directions")]
    pub directions: usize,
}

impl TccConfig {
    fn default_events() -> usize {
        100
    }

    fn default_directions() -> usize {
        crate::mass::MIN_TCC_DIRECTIONS
    }
}

impl Default for TccConfig {
    fn default() -> Self {
        TccConfig { events: Self::default_events(), directions: Self::default_directions() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Output file name (defaults to `<command>.<format>`) and format.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    pub spacetime: SpacetimeConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub imcf: ImcfConfig,
    #[serde(default)]
    pub tcc: TccConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> std::result::Result<ScenarioConfig, serde_json::Error> {
        serde_json::from_str(text)
    }
}
