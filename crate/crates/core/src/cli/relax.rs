use std::io::Write;

use super::scenario::Scenario;
use crate::error::Result;
use crate::thermo::{
    avg_flux, equilibrium_beta, format_float, integrate, pair_label, ThermoState, Trajectory,
};

/// Gap below which the two reservoirs count as equalized for `t_eq`.
pub const EQUILIBRATED_GAP: f64 = 1e-3;

/// Relative change of the initial flux when `epsilon` is halved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonCheck {
    pub flux: f64,
    pub flux_half: f64,
    pub relative_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxSummary {
    pub omega_d: f64,
    pub omega0: f64,
    pub epsilon: f64,
    pub terminal: ThermoState,
    pub equilibrium_beta: f64,
    /// First output time at which every selected pair is below the fade threshold.
    pub t_fade: Option<f64>,
    /// First output time with `|beta_z - beta_d| < 1e-3 max(beta_z, beta_d)`.
    pub t_eq: Option<f64>,
    pub tau_late: Option<f64>,
    pub max_initial_concurrence: f64,
    pub epsilon_check: Option<EpsilonCheck>,
}

#[derive(Debug, Clone)]
pub struct RelaxOutput {
    pub trajectory: Trajectory,
    pub summary: RelaxSummary,
}

pub fn fade_time(traj: &Trajectory, pairs: &[(usize, usize)], threshold: f64) -> Option<f64> {
    let cols: Vec<usize> = pairs.iter().filter_map(|&p| traj.column(p)).collect();
    traj.records
        .iter()
        .find(|r| cols.iter().all(|&c| r.concurrence[c] < threshold))
        .map(|r| r.t)
}

pub fn equalization_time(traj: &Trajectory, gap: f64) -> Option<f64> {
    traj.records
        .iter()
        .find(|r| {
            (r.state.beta_z - r.state.beta_d).abs() < gap * r.state.beta_z.max(r.state.beta_d)
        })
        .map(|r| r.t)
}

/// Gap window, relative to the initial gap, used for the late-stage fit.
pub const LATE_STAGE_WINDOW: (f64, f64) = (1e-5, 1e-1);

/// Characteristic time `-1 / slope` of a least-squares fit of `ln |beta_z - beta_d|`
/// over the records inside [`LATE_STAGE_WINDOW`]. `None` with fewer than three such records.
pub fn late_stage_time(traj: &Trajectory) -> Option<f64> {
    let gap = |r: &crate::thermo::Record| (r.state.beta_z - r.state.beta_d).abs();
    let g0 = gap(traj.records.first()?);
    if g0 == 0.0 {
        return None;
    }
    let (lo, hi) = LATE_STAGE_WINDOW;
    let pts: Vec<(f64, f64)> = traj
        .records
        .iter()
        .filter(|r| {
            let rel = gap(r) / g0;
            rel >= lo && rel <= hi
        })
        .map(|r| (r.t, gap(r).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -1.0 / slope)
}

pub fn run_relax(scenario: &Scenario) -> Result<RelaxOutput> {
    let geom = scenario.geometry()?;
    let ops = scenario.operators()?;
    let s0 = scenario.initial_state();
    let settings = scenario.settings(&ops);
    let equilibrium = equilibrium_beta(&ops, s0)?;
    let mut trajectory = integrate(&ops, s0, &settings)?;
    trajectory.meta.geometry = geom.label().to_string();

    let epsilon_check = if scenario.check_epsilon {
        let flux = avg_flux(&ops, s0, settings.epsilon)?;
        let flux_half = avg_flux(&ops, s0, 0.5 * settings.epsilon)?;
        let relative_change = if flux == 0.0 {
            0.0
        } else {
            ((flux_half - flux) / flux).abs()
        };
        Some(EpsilonCheck {
            flux,
            flux_half,
            relative_change,
        })
    } else {
        None
    };

    let pairs = scenario.pairs.resolve(geom.spins())?;
    let first = &trajectory.records[0];
    let max_initial_concurrence = pairs
        .iter()
        .filter_map(|&p| trajectory.column(p))
        .map(|c| first.concurrence[c])
        .fold(0.0, f64::max);
    let summary = RelaxSummary {
        omega_d: ops.omega_d,
        omega0: ops.omega0,
        epsilon: settings.epsilon,
        terminal: trajectory.last().state,
        equilibrium_beta: equilibrium,
        t_fade: fade_time(&trajectory, &pairs, scenario.fade_threshold),
        t_eq: equalization_time(&trajectory, EQUILIBRATED_GAP),
        tau_late: late_stage_time(&trajectory),
        max_initial_concurrence,
        epsilon_check,
    };
    Ok(RelaxOutput {
        trajectory,
        summary,
    })
}

fn optional(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), format_float)
}

impl RelaxSummary {
    /// `key=value` lines.
    pub fn write<W: Write>(&self, pairs: &[(usize, usize)], mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega_d={}", format_float(self.omega_d))?;
        writeln!(out, "omega0={}", format_float(self.omega0))?;
        writeln!(out, "epsilon={}", format_float(self.epsilon))?;
        writeln!(out, "beta_z_final={}", format_float(self.terminal.beta_z))?;
        writeln!(out, "beta_d_final={}", format_float(self.terminal.beta_d))?;
        writeln!(
            out,
            "beta_equilibrium={}",
            format_float(self.equilibrium_beta)
        )?;
        writeln!(out, "t_eq={}", optional(self.t_eq))?;
        writeln!(out, "tau_late={}", optional(self.tau_late))?;
        let labels: Vec<String> = pairs.iter().map(|&p| pair_label(p)).collect();
        writeln!(out, "fade_pairs={}", labels.join(" "))?;
        writeln!(
            out,
            "max_initial_concurrence={}",
            format_float(self.max_initial_concurrence)
        )?;
        writeln!(out, "t_fade={}", optional(self.t_fade))?;
        if let Some(c) = &self.epsilon_check {
            writeln!(out, "flux_initial={}", format_float(c.flux))?;
            writeln!(
                out,
                "flux_initial_half_epsilon={}",
                format_float(c.flux_half)
            )?;
            writeln!(
                out,
                "flux_epsilon_sensitivity={}",
                format_float(c.relative_change)
            )?;
        }
        Ok(())
    }
}
