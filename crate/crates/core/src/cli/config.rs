//! Run configuration, read from JSON.
//!
//! Physical inputs are dimensionless: times in units of `1/gamma0`, the
//! coupling as `gamma0/omega0` and the mirror distance as
//! `zeta = omega0 z0 / c`. An optional `si` block is converted once on load
//! and dropped from the resolved configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qfi::{Method, ParameterTag};
use crate::types::{AtomSpec, Environment, Polarization};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ScanBoundary,
    Evolve,
    Qfi,
    FreqOpt,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ScanBoundary => "scan-boundary",
            Command::Evolve => "evolve",
            Command::Qfi => "qfi",
            Command::FreqOpt => "freq-opt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    12
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: None, format: Format::Csv, precision: default_precision() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default = "default_coupling")]
    pub gamma_over_omega: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

fn default_coupling() -> f64 {
    1e-6
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self { gamma_over_omega: default_coupling(), theta: default_theta(), phi: 0.0 }
    }
}

/// Physical inputs in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiBlock {
    /// Transition angular frequency, rad/s.
    pub omega0: f64,
    /// Free-space decay rate, 1/s.
    #[serde(default)]
    pub gamma0: Option<f64>,
    /// Mirror distance, m.
    #[serde(default)]
    pub z0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationConfig {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for PolarizationConfig {
    fn default() -> Self {
        let third = 1.0 / 3.0;
        Self { x: third, y: third, z: third }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiOptions {
    #[serde(default = "default_param")]
    pub param: ParameterTag,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
}

fn default_param() -> ParameterTag {
    ParameterTag::Theta
}

fn all_methods() -> Vec<Method> {
    vec![Method::ClosedForm, Method::BlochForm, Method::SpectralForm]
}

impl Default for QfiOptions {
    fn default() -> Self {
        Self { param: default_param(), methods: all_methods() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreqMode {
    #[default]
    Single,
    Ramsey,
}

impl FromStr for FreqMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(FreqMode::Single),
            "ramsey" => Ok(FreqMode::Ramsey),
            other => Err(format!("unknown mode '{other}' (expected single or ramsey)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqOptOptions {
    #[serde(default)]
    pub mode: FreqMode,
    /// Total probing time in units of `1/gamma0`; required in ramsey mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub atom: AtomConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub si: Option<SiBlock>,
    #[serde(default = "unbounded")]
    pub environment: Environment,
    #[serde(default)]
    pub polarization: PolarizationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub qfi: QfiOptions,
    #[serde(default)]
    pub freq_opt: FreqOptOptions,
}

fn unbounded() -> Environment {
    Environment::Unbounded
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Converts the SI block into dimensionless inputs and checks invariants.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        if let Some(si) = self.si.take() {
            if !(si.omega0.is_finite() && si.omega0 > 0.0) {
                return Err(bad(format!("si.omega0 must be positive, got {}", si.omega0)));
            }
            if let Some(gamma0) = si.gamma0 {
                self.atom.gamma_over_omega = gamma0 / si.omega0;
            }
            if let Some(z0) = si.z0 {
                self.environment = Environment::Boundary { zeta: si.omega0 * z0 / SPEED_OF_LIGHT };
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.atom_spec()?;
        self.polarization()?;
        self.environment.validate().map_err(|e| bad(e.to_string()))?;
        if !(6..=17).contains(&self.output.precision) {
            return Err(bad(format!("output.precision {} outside [6, 17]", self.output.precision)));
        }
        if let Some(grid) = &self.grid {
            if grid.points < 2 {
                return Err(bad("grid.points must be at least 2"));
            }
            if !(grid.min.is_finite() && grid.max.is_finite() && grid.min < grid.max) {
                return Err(bad(format!("grid requires min < max, got [{}, {}]", grid.min, grid.max)));
            }
            if grid.spacing == Spacing::Log && grid.min <= 0.0 {
                return Err(bad("log grid requires min > 0"));
            }
        }
        if self.qfi.methods.is_empty() {
            return Err(bad("qfi.methods must not be empty"));
        }
        if let Some(t) = self.freq_opt.total_time {
            if !(t.is_finite() && t > 0.0) {
                return Err(bad(format!("freq_opt.total_time must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn atom_spec(&self) -> Result<AtomSpec, ConfigError> {
        AtomSpec::dimensionless(self.atom.gamma_over_omega, self.atom.theta, self.atom.phi)
            .map_err(|e| bad(e.to_string()))
    }

    pub fn polarization(&self) -> Result<Polarization, ConfigError> {
        let p = self.polarization;
        Polarization::new(p.x, p.y, p.z).map_err(|e| bad(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        self.grid.ok_or_else(|| bad("this command needs a grid"))
    }
}
