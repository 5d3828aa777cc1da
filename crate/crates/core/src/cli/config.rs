//! Scenario files (TOML) and tolerance overrides.
//!
//! ```toml
//! probe = "number:2"
//! tick = "vacuum"
//! cutoff = 60
//! outputs = ["gamma", "metrics"]
//! out = "results"
//!
//! [grid]
//! extent = 6.0
//! points = 128
//!
//! [tolerance]
//! theorem = 1e-5
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::StateSpec;
use crate::coherence::GammaRoute;
use crate::error::{Error, Result};
use crate::phase_space::Grid2D;
use crate::DEFAULT_CUTOFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Gamma,
    Prob,
    Metrics,
    Marginal,
    Verify,
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Povm,
    Theorem,
    Metrics,
    Examples,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RouteArg {
    Char,
    Wigner,
}

impl From<RouteArg> for GammaRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Char => GammaRoute::Characteristic,
            RouteArg::Wigner => GammaRoute::Wigner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub extent: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = Grid2D::default();
        Self {
            extent: g.extent(),
            points: g.points(),
        }
    }
}

/// Bounds used by the verification suites, overridable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|tr Π₀ − 1/π|`.
    pub trace: f64,
    /// Completeness residual on the witness subspace.
    pub completeness: f64,
    /// Trace loss of displaced POVM elements.
    pub povm_trace: f64,
    /// Most negative eigenvalue allowed for a POVM element.
    pub positivity: f64,
    /// `max |p(α|β) − p(α−β|0)|`.
    pub shift: f64,
    /// Raw-trace statistics against the direct formula.
    pub conditional: f64,
    /// `max |p_direct − FT[Γ]|`.
    pub theorem: f64,
    /// `max |Γ_wigner − Γ_char|`.
    pub routes: f64,
    /// `max |p − πΓ|`.
    pub proportionality: f64,
    /// `|τ_c Δβ π² − 1|`.
    pub parseval: f64,
    /// Relative error of `τ_c` for Gaussian states.
    pub tau_c: f64,
    /// Relative error of `τ_c` for number states.
    pub tau_c_number: f64,
    /// Relative error of the directional coherence.
    pub directional: f64,
    /// `|∫p − 1|`.
    pub normalization: f64,
    /// `|Γ(0) − 1/π²|`.
    pub origin: f64,
    /// `max |Γ*(τ) − Γ(−τ)|`.
    pub symmetry: f64,
    /// Largest imaginary part of a Wigner function.
    pub reality: f64,
    /// Phase-space overlap against the Fock-space trace.
    pub overlap: f64,
    /// Marginal of the vacuum `Γ` against its Gaussian form.
    pub marginal: f64,
    /// Numerical figure curves against their closed forms.
    pub figure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-10,
            completeness: 1e-3,
            povm_trace: 1e-8,
            positivity: 1e-9,
            shift: 1e-6,
            conditional: 1e-8,
            theorem: 1e-5,
            routes: 1e-6,
            proportionality: 1e-6,
            parseval: 1e-3,
            tau_c: 1e-4,
            tau_c_number: 1e-3,
            directional: 1e-3,
            normalization: 1e-5,
            origin: 1e-12,
            symmetry: 1e-10,
            reality: 1e-10,
            overlap: 1e-6,
            marginal: 1e-6,
            figure: 1e-6,
        }
    }
}

impl Tolerances {
    /// Overrides one bound by field name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::input(format!(
                "tolerance.{name} must be a positive number"
            )));
        }
        let mut map = match serde_json::to_value(*self) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("tolerances serialize to an object"),
        };
        if !map.contains_key(name) {
            let known: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(Error::input(format!(
                "unknown tolerance `{name}`; known: {}",
                known.join(", ")
            )));
        }
        map.insert(name.to_string(), value.into());
        *self = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::input(e.to_string()))?;
        Ok(())
    }
}

/// A scenario file. Every field is optional; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub probe: StateSpec,
    pub tick: StateSpec,
    pub grid: GridConfig,
    pub cutoff: usize,
    pub outputs: Vec<OutputKind>,
    pub out: PathBuf,
    pub route: RouteArg,
    pub suite: Suite,
    pub figures: Figure,
    pub tolerance: Tolerances,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            probe: StateSpec::Vacuum,
            tick: StateSpec::Vacuum,
            grid: GridConfig::default(),
            cutoff: DEFAULT_CUTOFF,
            outputs: Vec::new(),
            out: PathBuf::from("."),
            route: RouteArg::Char,
            suite: Suite::All,
            figures: Figure::All,
            tolerance: Tolerances::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(1..=4096).contains(&self.cutoff) {
            return Err(Error::input(format!(
                "cutoff must lie in 1..=4096, got {}",
                self.cutoff
            )));
        }
        let t = serde_json::to_value(self.tolerance).expect("tolerances serialize");
        for (k, v) in t.as_object().expect("object") {
            if !(v.as_f64().unwrap_or(0.0) > 0.0) {
                return Err(Error::input(format!("tolerance.{k} must be positive")));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::fft(self.grid.extent, self.grid.points)
    }
}
