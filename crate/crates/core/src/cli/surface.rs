use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::entanglement::concurrence_all;
use crate::error::{Error, Result};
use crate::hamiltonian::OperatorSet;
use crate::thermo::{format_float, integrate, pair_label, qe_density, FluxModel, ThermoState};

use super::scenario::Scenario;

/// Grid resolution `<nz>x<nd>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub nz: usize,
    pub nd: usize,
}

impl FromStr for GridSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "grid: expected <nz>x<nd> with both >= 2, got '{s}'"
            ))
        };
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let nz: usize = a.trim().parse().map_err(|_| bad())?;
        let nd: usize = b.trim().parse().map_err(|_| bad())?;
        if nz < 2 || nd < 2 {
            return Err(bad());
        }
        Ok(GridSize { nz, nd })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRequest {
    pub grid: GridSize,
    pub zmax: f64,
    pub dmax: f64,
    pub overlay: bool,
    /// Evaluate on the non-equilibrium state instead of the quasi-equilibrium one.
    pub non_equilibrium: bool,
}

impl SurfaceRequest {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("zmax", self.zmax), ("dmax", self.dmax)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name}: must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Pairwise concurrence sampled at one point of the temperature plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub state: ThermoState,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSurface {
    pub pairs: Vec<(usize, usize)>,
    pub beta_z: Vec<f64>,
    pub beta_d: Vec<f64>,
    /// Row-major over `(beta_z, beta_d)`.
    pub grid: Vec<SurfacePoint>,
    /// `beta_z = beta_d` along the `beta_z` axis.
    pub diagonal: Vec<SurfacePoint>,
    pub overlay: Option<Vec<SurfacePoint>>,
}

impl ConcurrenceSurface {
    pub fn at(&self, iz: usize, id: usize) -> &SurfacePoint {
        &self.grid[iz * self.beta_d.len() + id]
    }

    /// Long format: `beta_z,beta_d,pair,C`. Diagonal and overlay rows tag the pair
    /// as `diag-12` and `overlay-12`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let labels: Vec<String> = self
            .pairs
            .iter()
            .map(|&p| pair_label(p).trim_start_matches("C_").to_owned())
            .collect();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["beta_z", "beta_d", "pair", "C"])?;
        let mut emit = |points: &[SurfacePoint], prefix: &str| -> Result<()> {
            for p in points {
                for (label, &c) in labels.iter().zip(&p.values) {
                    w.write_record([
                        format_float(p.state.beta_z),
                        format_float(p.state.beta_d),
                        format!("{prefix}{label}"),
                        format_float(c),
                    ])?;
                }
            }
            Ok(())
        };
        emit(&self.grid, "")?;
        emit(&self.diagonal, "diag-")?;
        if let Some(overlay) = &self.overlay {
            emit(overlay, "overlay-")?;
        }
        w.flush()?;
        Ok(())
    }
}

fn linspace(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

fn sample(
    ops: &OperatorSet,
    model: Option<&FluxModel>,
    states: &[ThermoState],
) -> Result<Vec<SurfacePoint>> {
    states
        .par_iter()
        .map(|&state| {
            let rho = match model {
                Some(m) => m.ne_density(state)?,
                None => qe_density(ops, state)?,
            };
            let values = concurrence_all(&rho)?
                .into_iter()
                .map(|p| p.value)
                .collect();
            Ok(SurfacePoint { state, values })
        })
        .collect()
}

pub fn run_surface(scenario: &Scenario, req: &SurfaceRequest) -> Result<ConcurrenceSurface> {
    req.validate()?;
    let ops = scenario.operators()?;
    let model = if req.non_equilibrium {
        Some(FluxModel::new(&ops, scenario.epsilon(&ops))?)
    } else {
        None
    };
    let beta_z = linspace(req.zmax, req.grid.nz);
    let beta_d = linspace(req.dmax, req.grid.nd);
    let states: Vec<ThermoState> = beta_z
        .iter()
        .flat_map(|&z| beta_d.iter().map(move |&d| ThermoState::new(z, d)))
        .collect();
    let grid = sample(&ops, model.as_ref(), &states)?;
    let diag: Vec<ThermoState> = beta_z
        .iter()
        .map(|&b| ThermoState::equilibrium(b))
        .collect();
    let diagonal = sample(&ops, model.as_ref(), &diag)?;
    let overlay = if req.overlay {
        let traj = integrate(&ops, scenario.initial_state(), &scenario.settings(&ops))?;
        let path: Vec<ThermoState> = traj.records.iter().map(|r| r.state).collect();
        Some(sample(&ops, model.as_ref(), &path)?)
    } else {
        None
    };
    let pairs = (1..=ops.spins)
        .flat_map(|j| (j + 1..=ops.spins).map(move |k| (j, k)))
        .collect();
    Ok(ConcurrenceSurface {
        pairs,
        beta_z,
        beta_d,
        grid,
        diagonal,
        overlay,
    })
}
