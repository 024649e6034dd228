use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ode::{solve, StepControl};
use super::{energies, qe_density, FluxModel, ThermoState};
use crate::entanglement::concurrence_all;
use crate::error::{Error, Result};
use crate::hamiltonian::OperatorSet;

/// Number of rows emitted when no output interval is configured.
pub const DEFAULT_ROWS: usize = 200;

/// Relative temperature gap at which integration stops.
pub const EQUALIZED_GAP: f64 = 1e-6;

/// Which density matrix the per-record concurrences are evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcurrenceSource {
    /// Quasi-equilibrium state at the current temperatures.
    #[default]
    Qe,
    /// Non-equilibrium state including the flux correction.
    Ne,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationSettings {
    pub epsilon: f64,
    pub t_max: f64,
    pub tol: f64,
    /// Spacing of output records; `None` gives [`DEFAULT_ROWS`] rows over `[0, t_max]`.
    pub output_every: Option<f64>,
    pub concurrence: ConcurrenceSource,
}

impl IntegrationSettings {
    pub fn new(epsilon: f64, t_max: f64, tol: f64) -> Self {
        IntegrationSettings {
            epsilon,
            t_max,
            tol,
            output_every: None,
            concurrence: ConcurrenceSource::Qe,
        }
    }

    fn output_times(&self) -> Vec<f64> {
        let step = self
            .output_every
            .unwrap_or(self.t_max / (DEFAULT_ROWS - 1) as f64);
        let count = (self.t_max / step * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
        if let Some(last) = times.last_mut() {
            if (*last - self.t_max).abs() <= 1e-9 * self.t_max {
                *last = self.t_max;
            } else if *last < self.t_max {
                times.push(self.t_max);
            }
        }
        times
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: ThermoState,
    pub e_z: f64,
    pub e_d: f64,
    /// One value per entry of [`Trajectory::pairs`].
    pub concurrence: Vec<f64>,
}

impl Record {
    pub fn total_energy(&self) -> f64 {
        self.e_z + self.e_d
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub geometry: String,
    pub ratio: f64,
    pub epsilon: f64,
    pub initial: Option<ThermoState>,
    pub tol: f64,
    pub t_max: f64,
    pub stopped_early: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub pairs: Vec<(usize, usize)>,
    pub records: Vec<Record>,
    pub meta: TrajectoryMeta,
}

fn all_pairs(spins: usize) -> Vec<(usize, usize)> {
    (1..=spins)
        .flat_map(|j| (j + 1..=spins).map(move |k| (j, k)))
        .collect()
}

/// Shortest round-trip decimal representation.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else {
        x.to_string()
    }
}

fn parse_float(field: &str, line: u64) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: '{field}' is not a number")))
}

fn parse_pair(name: &str) -> Option<(usize, usize)> {
    let digits = name.strip_prefix("C_")?;
    if digits.len() == 2 {
        let mut it = digits.chars().map(|c| c.to_digit(10).map(|d| d as usize));
        Some((it.next()??, it.next()??))
    } else {
        let (a, b) = digits.split_once('_')?;
        Some((a.parse().ok()?, b.parse().ok()?))
    }
}

/// Column label for a pair: `C_12` for single-digit sites, `C_10_11` otherwise.
pub fn pair_label(pair: (usize, usize)) -> String {
    if pair.0 < 10 && pair.1 < 10 {
        format!("C_{}{}", pair.0, pair.1)
    } else {
        format!("C_{}_{}", pair.0, pair.1)
    }
}

impl Trajectory {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["t", "beta_z", "beta_d", "E_z", "E_d"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(self.pairs.iter().map(|&p| pair_label(p)));
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in &self.records {
            let mut row = vec![
                format_float(r.t),
                format_float(r.state.beta_z),
                format_float(r.state.beta_d),
                format_float(r.e_z),
                format_float(r.e_d),
            ];
            row.extend(r.concurrence.iter().map(|&c| format_float(c)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    /// Parses the CSV written by [`Trajectory::write_csv`]; metadata is left empty.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let header = rd.headers()?.clone();
        let fixed = ["t", "beta_z", "beta_d", "E_z", "E_d"];
        if header.len() < fixed.len() || header.iter().zip(fixed).any(|(a, b)| a != b) {
            return Err(Error::Config(format!(
                "unexpected trajectory header {header:?}"
            )));
        }
        let pairs = header
            .iter()
            .skip(fixed.len())
            .map(|name| {
                parse_pair(name).ok_or_else(|| Error::Config(format!("bad column '{name}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut records = Vec::new();
        for row in rd.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line());
            let v = row
                .iter()
                .map(|f| parse_float(f, line))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != header.len() {
                return Err(Error::Config(format!(
                    "line {line}: expected {} fields",
                    header.len()
                )));
            }
            records.push(Record {
                t: v[0],
                state: ThermoState::new(v[1], v[2]),
                e_z: v[3],
                e_d: v[4],
                concurrence: v[5..].to_vec(),
            });
        }
        Ok(Trajectory {
            pairs,
            records,
            meta: TrajectoryMeta::default(),
        })
    }

    pub fn last(&self) -> &Record {
        self.records
            .last()
            .expect("trajectories hold at least one record")
    }

    pub fn column(&self, pair: (usize, usize)) -> Option<usize> {
        let key = if pair.0 < pair.1 {
            pair
        } else {
            (pair.1, pair.0)
        };
        self.pairs.iter().position(|&p| p == key)
    }
}

fn equalized(s: ThermoState) -> bool {
    (s.beta_z - s.beta_d).abs() < EQUALIZED_GAP * s.beta_z.max(s.beta_d)
}

/// Integrates the two-temperature relaxation from `s0`.
///
/// Stops at `t_max` or as soon as `|beta_z - beta_d| < 1e-6 max(beta_z, beta_d)`;
/// in the latter case the stopping point is appended as the final record.
pub fn integrate(
    ops: &OperatorSet,
    s0: ThermoState,
    settings: &IntegrationSettings,
) -> Result<Trajectory> {
    if !(settings.t_max.is_finite() && settings.t_max > 0.0) {
        return Err(Error::Domain(format!(
            "t_max = {} must be positive",
            settings.t_max
        )));
    }
    if !(settings.tol > 0.0 && settings.tol < 1.0) {
        return Err(Error::Domain(format!(
            "tol = {} must lie in (0, 1)",
            settings.tol
        )));
    }
    if let Some(dt) = settings.output_every {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!(
                "output interval {dt} must be positive"
            )));
        }
    }
    let model = FluxModel::new(ops, settings.epsilon)?;
    let times = settings.output_times();
    let ctrl = StepControl::relative(settings.tol);
    let sol = solve(
        |y: &[f64; 2]| {
            let (dz, dd) = model.rhs(ThermoState::new(y[0], y[1]))?;
            Ok([dz, dd])
        },
        0.0,
        [s0.beta_z, s0.beta_d],
        settings.t_max,
        &times,
        &ctrl,
        |_, y| equalized(ThermoState::new(y[0], y[1])),
    )?;

    let mut points = sol.outputs.clone();
    let (t_end, y_end) = sol.end;
    if points.last().is_none_or(|&(t, _)| t < t_end) {
        points.push((t_end, y_end));
    }

    let pairs = all_pairs(ops.spins);
    let records = points
        .into_iter()
        .map(|(t, y)| {
            let state = ThermoState::new(y[0], y[1]);
            let (e_z, e_d) = energies(ops, state)?;
            let rho = match settings.concurrence {
                ConcurrenceSource::Qe => qe_density(ops, state)?,
                ConcurrenceSource::Ne => model.ne_density(state)?,
            };
            let concurrence = concurrence_all(&rho)?
                .into_iter()
                .map(|p| p.value)
                .collect();
            Ok(Record {
                t,
                state,
                e_z,
                e_d,
                concurrence,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Trajectory {
        pairs,
        records,
        meta: TrajectoryMeta {
            geometry: String::new(),
            ratio: ops.ratio(),
            epsilon: settings.epsilon,
            initial: Some(s0),
            tol: settings.tol,
            t_max: settings.t_max,
            stopped_early: sol.stopped_early,
            accepted_steps: sol.accepted_steps,
            rejected_steps: sol.rejected_steps,
        },
    })
}
