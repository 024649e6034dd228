use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Coupling, GeometryLabel, SpinGeometry};
use crate::hamiltonian::OperatorSet;
use crate::thermo::{ConcurrenceSource, IntegrationSettings, ThermoState};

fn default_spins() -> usize {
    4
}
fn default_ratio() -> f64 {
    45.0
}
fn default_beta_z0() -> f64 {
    1e-4
}
fn default_beta_d0() -> f64 {
    7e-3
}
fn default_epsilon_factor() -> f64 {
    0.01
}
fn default_t_max() -> f64 {
    600.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_fade_threshold() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}

/// Pair subset used for the fade time; `"all"` or a list of `[m, n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSelection {
    Keyword(String),
    List(Vec<[usize; 2]>),
}

impl Default for PairSelection {
    fn default() -> Self {
        PairSelection::Keyword("all".into())
    }
}

impl PairSelection {
    pub fn resolve(&self, spins: usize) -> Result<Vec<(usize, usize)>> {
        match self {
            PairSelection::Keyword(k) if k == "all" => Ok((1..=spins)
                .flat_map(|j| (j + 1..=spins).map(move |k| (j, k)))
                .collect()),
            PairSelection::Keyword(k) => Err(Error::Config(format!(
                "pairs: expected \"all\" or a list of [m, n], got \"{k}\""
            ))),
            PairSelection::List(list) => {
                if list.is_empty() {
                    return Err(Error::Config("pairs: list is empty".into()));
                }
                list.iter()
                    .map(|&[m, n]| {
                        if m == n || m == 0 || n == 0 || m > spins || n > spins {
                            Err(Error::Config(format!(
                                "pairs: [{m}, {n}] is not a pair of distinct sites in 1..={spins}"
                            )))
                        } else {
                            Ok((m.min(n), m.max(n)))
                        }
                    })
                    .collect()
            }
        }
    }
}

/// One relaxation scenario, read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub geometry: GeometryLabel,
    /// Cluster size for chains and rings.
    #[serde(default = "default_spins")]
    pub spins: usize,
    /// Explicit pair list, required for `"custom"` geometries.
    #[serde(default)]
    pub couplings: Option<Vec<Coupling>>,
    /// `omega_0 / omega_d`.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_beta_z0")]
    pub beta_z0: f64,
    #[serde(default = "default_beta_d0")]
    pub beta_d0: f64,
    /// `epsilon = epsilon_factor * omega_d`.
    #[serde(default = "default_epsilon_factor")]
    pub epsilon_factor: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output_every: Option<f64>,
    #[serde(default)]
    pub pairs: PairSelection,
    #[serde(default = "default_fade_threshold")]
    pub fade_threshold: f64,
    #[serde(default)]
    pub concurrence_state: ConcurrenceSource,
    /// Compare the initial flux at `epsilon` and `epsilon / 2`.
    #[serde(default = "default_true")]
    pub check_epsilon: bool,
    /// Permit negative spin temperatures in the initial state.
    #[serde(default)]
    pub allow_negative_beta: bool,
}

impl Scenario {
    /// The shipped calibration for a built-in geometry.
    pub fn preset(geometry: GeometryLabel) -> Self {
        Scenario {
            geometry,
            spins: default_spins(),
            couplings: None,
            ratio: default_ratio(),
            beta_z0: default_beta_z0(),
            beta_d0: default_beta_d0(),
            epsilon_factor: default_epsilon_factor(),
            t_max: default_t_max(),
            tol: default_tol(),
            output_every: None,
            pairs: PairSelection::default(),
            fade_threshold: default_fade_threshold(),
            concurrence_state: ConcurrenceSource::Qe,
            check_epsilon: true,
            allow_negative_beta: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, msg: String| Err(Error::Config(format!("{name}: {msg}")));
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return field("ratio", format!("must be positive, got {}", self.ratio));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return field("t_max", format!("must be positive, got {}", self.t_max));
        }
        if !(self.tol > 1e-14 && self.tol < 1e-2) {
            return field(
                "tol",
                format!("must lie in (1e-14, 1e-2), got {}", self.tol),
            );
        }
        for (name, b) in [("beta_z0", self.beta_z0), ("beta_d0", self.beta_d0)] {
            if !b.is_finite() {
                return field(name, format!("must be finite, got {b}"));
            }
            if b < 0.0 && !self.allow_negative_beta {
                return field(
                    name,
                    format!("negative inverse temperature {b} needs allow_negative_beta"),
                );
            }
        }
        if !(self.epsilon_factor.is_finite() && self.epsilon_factor > 0.0) {
            return field(
                "epsilon_factor",
                format!("must be positive, got {}", self.epsilon_factor),
            );
        }
        if let Some(dt) = self.output_every {
            if !(dt.is_finite() && dt > 0.0) {
                return field("output_every", format!("must be positive, got {dt}"));
            }
        }
        if !(self.fade_threshold.is_finite() && self.fade_threshold > 0.0) {
            return field(
                "fade_threshold",
                format!("must be positive, got {}", self.fade_threshold),
            );
        }
        match (self.geometry, &self.couplings) {
            (GeometryLabel::Custom, None) => {
                return field("couplings", "required for custom geometries".into())
            }
            (GeometryLabel::Custom, Some(_)) => {}
            (_, Some(_)) => {
                return field(
                    "couplings",
                    "only allowed with \"geometry\": \"custom\"".into(),
                )
            }
            _ => {}
        }
        let geom = self.geometry()?;
        self.pairs.resolve(geom.spins())?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<SpinGeometry> {
        let built = match (self.geometry, &self.couplings) {
            (GeometryLabel::Custom, Some(list)) => {
                SpinGeometry::new(self.spins, list.clone(), GeometryLabel::Custom)
            }
            (label, _) => SpinGeometry::builtin(label, self.spins),
        };
        built.map_err(|e| match e {
            Error::Domain(msg) => Error::Config(format!("geometry: {msg}")),
            other => other,
        })
    }

    pub fn operators(&self) -> Result<OperatorSet> {
        OperatorSet::from_ratio(&self.geometry()?, self.ratio)
    }

    pub fn initial_state(&self) -> ThermoState {
        ThermoState::new(self.beta_z0, self.beta_d0)
    }

    pub fn epsilon(&self, ops: &OperatorSet) -> f64 {
        self.epsilon_factor * ops.omega_d
    }

    pub fn settings(&self, ops: &OperatorSet) -> IntegrationSettings {
        IntegrationSettings {
            epsilon: self.epsilon(ops),
            t_max: self.t_max,
            tol: self.tol,
            output_every: self.output_every,
            concurrence: self.concurrence_state,
        }
    }
}
