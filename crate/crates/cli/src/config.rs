//! Config file handling. The file is TOML with one optional table per
//! experiment; every key is optional and unknown keys are rejected.
//!
//! ```toml
//! [sweep-kappa]
//! j = 15
//! state = "y"
//! n = [2, 4]
//! kappa-max = 5.0
//! ```

use std::path::Path;

use kicktop::experiments::{ExperimentConfig, ExperimentKind, InitialState};
use kicktop::Axis;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "sweep-kappa")]
    pub sweep_kappa: Option<Overrides>,
    pub contour: Option<Overrides>,
    #[serde(rename = "kappa-zero")]
    pub kappa_zero: Option<Overrides>,
    #[serde(rename = "odd-n")]
    pub odd_n: Option<Overrides>,
    pub classical: Option<Overrides>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn section(&self, kind: ExperimentKind) -> Option<&Overrides> {
        match kind {
            ExperimentKind::SweepKappa => self.sweep_kappa.as_ref(),
            ExperimentKind::Contour => self.contour.as_ref(),
            ExperimentKind::KappaZero => self.kappa_zero.as_ref(),
            ExperimentKind::OddN => self.odd_n.as_ref(),
            ExperimentKind::Classical => self.classical.as_ref(),
        }
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub j: Option<f64>,
    pub state: Option<String>,
    /// Shared measurement axis: `"x"`, `"y"`, `"z"`, or a 3-vector.
    pub axis: Option<AxisSpec>,
    pub axis_a: Option<AxisSpec>,
    pub axis_b: Option<AxisSpec>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_step: Option<f64>,
    pub n: Option<Vec<usize>>,
    #[serde(rename = "T")]
    pub window: Option<usize>,
    pub t_alpha_max: Option<usize>,
    pub orbit_kappas: Option<Vec<f64>>,
    pub orbit_steps: Option<usize>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Name(String),
    Vector([f64; 3]),
}

impl AxisSpec {
    pub fn resolve(&self) -> Result<Axis, CliError> {
        match self {
            AxisSpec::Name(name) => match name.as_str() {
                "x" => Ok(Axis::X),
                "y" => Ok(Axis::Y),
                "z" => Ok(Axis::Z),
                other => Err(CliError::Config(format!("unknown axis {other:?}"))),
            },
            AxisSpec::Vector([x, y, z]) => {
                Axis::from_direction(*x, *y, *z).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

impl Overrides {
    /// Layers `other` on top of `self`.
    pub fn merged(&self, other: &Overrides) -> Overrides {
        macro_rules! pick {
            ($($field:ident),*) => {
                Overrides { $($field: other.$field.clone().or_else(|| self.$field.clone()),)* }
            };
        }
        pick!(
            j,
            state,
            axis,
            axis_a,
            axis_b,
            kappa_min,
            kappa_max,
            kappa_step,
            n,
            window,
            t_alpha_max,
            orbit_kappas,
            orbit_steps,
            threads
        )
    }

    pub fn apply(&self, mut config: ExperimentConfig) -> Result<ExperimentConfig, CliError> {
        if let Some(j) = self.j {
            config.j = j;
        }
        if let Some(state) = &self.state {
            config.state =
                InitialState::parse(state).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(axis) = &self.axis {
            let axis = axis.resolve()?;
            config.axis_a = axis;
            config.axis_b = axis;
        }
        if let Some(axis) = &self.axis_a {
            config.axis_a = axis.resolve()?;
        }
        if let Some(axis) = &self.axis_b {
            config.axis_b = axis.resolve()?;
        }
        if let Some(v) = self.kappa_min {
            config.kappa.min = v;
        }
        if let Some(v) = self.kappa_max {
            config.kappa.max = v;
        }
        if let Some(v) = self.kappa_step {
            config.kappa.step = v;
        }
        if let Some(n) = &self.n {
            config.n_values = n.clone();
        }
        if let Some(w) = self.window {
            config.window = w;
        }
        if let Some(t) = self.t_alpha_max {
            config.t_alpha_max = t;
        }
        if let Some(k) = &self.orbit_kappas {
            config.orbit_kappas = k.clone();
        }
        if let Some(s) = self.orbit_steps {
            config.orbit_steps = s;
        }
        if self.threads.is_some() {
            config.threads = self.threads;
        }
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }
}
