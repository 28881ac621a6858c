//! Run configuration: what to compute, on which grids, and where to write it.

use std::f64::consts::PI;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use ck_backflow::dynamics::{CkParams, GaussianPacket, SuperposedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `j(0, t)` over a (θ, t) grid
    CurrentMap,
    /// `P(t)` for a list of stretching parameters
    LeftProb,
    /// `P±(t)` for bosons and fermions
    TwoParticle,
    /// fidelity against α_φ
    FidelityScan,
    /// fidelity and boson backflow against α_φ
    FidelityBackflow,
    /// analytic-versus-oracle self checks
    Validate,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::CurrentMap => "current-map",
            Scenario::LeftProb => "left-prob",
            Scenario::TwoParticle => "two-particle",
            Scenario::FidelityScan => "fidelity-scan",
            Scenario::FidelityBackflow => "fidelity-backflow",
            Scenario::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Ndjson,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Ndjson => "ndjson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0 }
    }
}

/// Two packets of common width, stretching and center, superposed as
/// `N(ψ_a + α e^{iθ} ψ_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub x0: f64,
    pub sigma_p: f64,
    pub p0a: f64,
    pub p0b: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl Default for StateSpec {
    fn default() -> Self {
        Self {
            x0: 0.0,
            sigma_p: 0.05,
            p0a: 1.4,
            p0b: 0.3,
            alpha: 1.9,
            theta: PI,
        }
    }
}

impl StateSpec {
    pub fn build(&self, eta: f64) -> ck_backflow::Result<SuperposedState> {
        self.build_with(eta, self.alpha, self.theta)
    }

    pub fn build_with(&self, eta: f64, alpha: f64, theta: f64) -> ck_backflow::Result<SuperposedState> {
        let a = GaussianPacket::new(self.x0, self.p0a, self.sigma_p, eta)?;
        let b = GaussianPacket::new(self.x0, self.p0b, self.sigma_p, eta)?;
        SuperposedState::new(a, b, alpha, theta)
    }
}

/// Evenly spaced samples including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }

    fn validate(&self, field: &str) -> Result<()> {
        ensure!(self.points >= 1, "{field}: points must be at least 1");
        ensure!(
            self.start.is_finite() && self.stop.is_finite(),
            "{field}: start and stop must be finite"
        );
        Ok(())
    }
}

/// A list of values, or an [`Axis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range(Axis),
}

impl Values {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Values::List(v) => v.clone(),
            Values::Range(a) => a.values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    /// Write raw current values instead of the ×1000 display column.
    pub raw: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            raw: false,
        }
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub units: Units,
    /// Acceleration of the linear potential; position-space scenarios need 0.
    pub g: f64,
    pub gammas: Vec<f64>,
    pub state: StateSpec,
    /// Stretching parameters (left-prob); other scenarios use the first.
    pub etas: Vec<f64>,
    /// Phase of the second one-particle state (two-particle).
    pub theta_phi: f64,
    pub alpha_phi: Values,
    pub theta_axis: Axis,
    pub time_axis: Axis,
    /// Window searched for backflow intervals.
    pub t_max: f64,
    /// Smallest reported probability gain.
    pub tol: f64,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn params(&self, gamma: f64) -> ck_backflow::Result<CkParams> {
        CkParams::new(gamma, self.g, self.units.mass, self.units.hbar)
    }

    pub fn eta(&self) -> f64 {
        self.etas.first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |field: &str, v: f64| -> Result<()> {
            ensure!(v.is_finite(), "{field} must be finite, got {v}");
            Ok(())
        };
        finite("units.mass", self.units.mass)?;
        finite("units.hbar", self.units.hbar)?;
        finite("g", self.g)?;
        finite("theta_phi", self.theta_phi)?;
        finite("t_max", self.t_max)?;
        finite("tol", self.tol)?;
        let s = &self.state;
        for (field, v) in [
            ("state.x0", s.x0),
            ("state.sigma_p", s.sigma_p),
            ("state.p0a", s.p0a),
            ("state.p0b", s.p0b),
            ("state.alpha", s.alpha),
            ("state.theta", s.theta),
        ] {
            finite(field, v)?;
        }
        for (field, list) in [("gammas", &self.gammas), ("etas", &self.etas)] {
            ensure!(!list.is_empty(), "{field} must not be empty");
            for v in list.iter() {
                finite(field, *v)?;
            }
        }
        for v in self.alpha_phi.values() {
            finite("alpha_phi", v)?;
        }
        if let Values::Range(a) = &self.alpha_phi {
            a.validate("alpha_phi")?;
        }
        ensure!(!self.alpha_phi.values().is_empty(), "alpha_phi must not be empty");
        self.theta_axis.validate("theta_axis")?;
        self.time_axis.validate("time_axis")?;
        ensure!(self.tol > 0.0, "tol must be positive");
        ensure!(self.t_max > 0.0, "t_max must be positive");
        for &gamma in &self.gammas {
            self.params(gamma).with_context(|| format!("gammas entry {gamma}"))?;
        }
        self.state
            .build(self.eta())
            .map(|_| ())
            .context("state does not describe a valid superposition")
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Applies a (possibly partial) TOML document on top of this config.
    pub fn overlay(&self, text: &str) -> Result<Self> {
        let patch: toml::Table = text.parse().context("config file is not valid TOML")?;
        let mut base = toml::Table::try_from(self)?;
        merge(&mut base, patch);
        let merged: Self = toml::Value::Table(base).try_into().context("config file does not match the schema")?;
        merged.validate()?;
        Ok(merged)
    }
}

fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (key, value) in patch {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

pub fn parse_scenario(name: &str) -> Result<Scenario> {
    match name {
        "current-map" => Ok(Scenario::CurrentMap),
        "left-prob" => Ok(Scenario::LeftProb),
        "two-particle" => Ok(Scenario::TwoParticle),
        "fidelity-scan" => Ok(Scenario::FidelityScan),
        "fidelity-backflow" => Ok(Scenario::FidelityBackflow),
        "validate" => Ok(Scenario::Validate),
        other => bail!("unknown scenario or preset `{other}`"),
    }
}
