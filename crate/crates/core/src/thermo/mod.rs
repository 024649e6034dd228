//! Two-temperature thermodynamics of the Zeeman and secular dipolar
//! reservoirs and the energy flux between them.
//!
//! The quasi-equilibrium state is `exp(-beta_z H_z - beta_d H_d) / Z`. Energy
//! moves between the reservoirs through the non-secular coupling; the flux
//! `<K>` is averaged over the non-equilibrium state
//!
//! ```text
//! rho_ne = exp(-beta_z H_z - beta_d H_d - (beta_d - beta_z) J) / Z_ne,
//! J      = int_{-inf}^0 dtau e^{eps tau} e^{i tau H} K e^{-i tau H},
//! ```
//!
//! and the inverse temperatures follow from `dE_z/dt = <K> = -dE_d/dt`
//! through the exact covariance Jacobian of the energies.

mod ode;
mod trajectory;

pub use ode::{solve, Solution, StepControl};
pub use trajectory::{
    format_float, integrate, pair_label, ConcurrenceSource, IntegrationSettings, Record,
    Trajectory, TrajectoryMeta, DEFAULT_ROWS, EQUALIZED_GAP,
};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorSet;
use crate::operator::{normalized_exp, trace_product, ComplexMatrix};

/// Condition number beyond which the susceptibility is treated as singular.
pub const MAX_CONDITION: f64 = 1e10;

/// Inverse spin temperatures of the Zeeman and dipolar reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub beta_z: f64,
    pub beta_d: f64,
}

impl ThermoState {
    pub fn new(beta_z: f64, beta_d: f64) -> Self {
        ThermoState { beta_z, beta_d }
    }

    pub fn equilibrium(beta: f64) -> Self {
        ThermoState::new(beta, beta)
    }

    pub fn is_finite(&self) -> bool {
        self.beta_z.is_finite() && self.beta_d.is_finite()
    }

    pub fn gap(&self) -> f64 {
        self.beta_d - self.beta_z
    }

    fn check(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("non-finite state {self:?}")))
        }
    }
}

fn qe_exponent(ops: &OperatorSet, s: ThermoState) -> ComplexMatrix {
    &ops.hz * Complex64::new(-s.beta_z, 0.0) + &ops.hd * Complex64::new(-s.beta_d, 0.0)
}

/// Quasi-equilibrium density matrix `exp(-beta_z H_z - beta_d H_d) / Z`.
pub fn qe_density(ops: &OperatorSet, s: ThermoState) -> Result<ComplexMatrix> {
    s.check()?;
    Ok(normalized_exp(&qe_exponent(ops, s))?.0)
}

/// `ln Z(beta_z, beta_d)`.
pub fn log_partition(ops: &OperatorSet, s: ThermoState) -> Result<f64> {
    s.check()?;
    Ok(normalized_exp(&qe_exponent(ops, s))?.1)
}

fn expect(rho: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    trace_product(rho, op)
        .expect("operators share the register dimension")
        .re
}

/// Zeeman and secular dipolar energies `(Tr rho H_z, Tr rho H_d)` of the quasi-equilibrium state.
pub fn energies(ops: &OperatorSet, s: ThermoState) -> Result<(f64, f64)> {
    let rho = qe_density(ops, s)?;
    Ok((expect(&rho, &ops.hz), expect(&rho, &ops.hd)))
}

/// `dE_i / dbeta_j = -Cov(H_i, H_j)` over the quasi-equilibrium state, with no conditioning check.
///
/// Exact because `H_z` and `H_d` commute. Index 0 is Zeeman, 1 dipolar.
pub fn energy_jacobian(ops: &OperatorSet, s: ThermoState) -> Result<Matrix2<f64>> {
    let rho = qe_density(ops, s)?;
    let dim = ops.dim();
    let identity = ComplexMatrix::identity(dim, dim);
    let centered = |h: &ComplexMatrix| h - &identity * Complex64::new(expect(&rho, h), 0.0);
    let dz = centered(&ops.hz);
    let dd = centered(&ops.hd);
    let rz = &rho * &dz;
    let rd = &rho * &dd;
    let czz = expect(&rz, &dz);
    let cdd = expect(&rd, &dd);
    let czd = 0.5 * (expect(&rz, &dd) + expect(&rd, &dz));
    Ok(Matrix2::new(-czz, -czd, -czd, -cdd))
}

/// Ratio of the largest to smallest eigenvalue magnitude of a symmetric 2x2 matrix.
pub fn condition_number(m: &Matrix2<f64>) -> f64 {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let radius = half_diff.hypot(0.5 * (m[(0, 1)] + m[(1, 0)]));
    let (a, b) = ((mean + radius).abs(), (mean - radius).abs());
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// The energy Jacobian, rejected when its condition number exceeds [`MAX_CONDITION`].
pub fn susceptibility(ops: &OperatorSet, s: ThermoState) -> Result<Matrix2<f64>> {
    let m = energy_jacobian(ops, s)?;
    let condition = condition_number(&m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularSusceptibility {
            condition,
            beta_z: s.beta_z,
            beta_d: s.beta_d,
        });
    }
    Ok(m)
}

/// The regularized retarded flux integral `J`.
///
/// In the eigenbasis of `H`, `J_ab = K_ab / (eps + i (E_a - E_b))`.
pub fn flux_correction(ops: &OperatorSet, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} must be finite and > 0"
        )));
    }
    let eig = &ops.eig_h;
    let mut kt = eig.to_eigenbasis(&ops.k);
    let n = eig.dim();
    for a in 0..n {
        for b in 0..n {
            let w = eig.values[a] - eig.values[b];
            kt[(a, b)] /= Complex64::new(epsilon, w);
        }
    }
    Ok(eig.from_eigenbasis(&kt))
}

/// Flux machinery at one regularization, with `J` computed once.
#[derive(Debug, Clone)]
pub struct FluxModel<'a> {
    ops: &'a OperatorSet,
    epsilon: f64,
    correction: ComplexMatrix,
}

impl<'a> FluxModel<'a> {
    pub fn new(ops: &'a OperatorSet, epsilon: f64) -> Result<Self> {
        let correction = flux_correction(ops, epsilon)?;
        Ok(FluxModel {
            ops,
            epsilon,
            correction,
        })
    }

    pub fn ops(&self) -> &'a OperatorSet {
        self.ops
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn correction(&self) -> &ComplexMatrix {
        &self.correction
    }

    pub fn ne_density(&self, s: ThermoState) -> Result<ComplexMatrix> {
        s.check()?;
        let mut x = qe_exponent(self.ops, s);
        let gap = s.gap();
        if gap != 0.0 {
            x -= &self.correction * Complex64::new(gap, 0.0);
        }
        Ok(normalized_exp(&x)?.0)
    }

    /// `<K> = Tr(rho_ne K)`, the rate of change of the Zeeman energy.
    ///
    /// Exactly zero on the diagonal: there `rho_ne` is the quasi-equilibrium
    /// state, which commutes with `H_z` and so annihilates `Tr(rho [H, H_z])`.
    pub fn avg_flux(&self, s: ThermoState) -> Result<f64> {
        s.check()?;
        if s.gap() == 0.0 {
            return Ok(0.0);
        }
        let rho = self.ne_density(s)?;
        Ok(expect(&rho, &self.ops.k))
    }

    /// `(dbeta_z/dt, dbeta_d/dt)` from `M dbeta/dt = (<K>, -<K>)`.
    pub fn rhs(&self, s: ThermoState) -> Result<(f64, f64)> {
        let flux = self.avg_flux(s)?;
        if flux == 0.0 {
            return Ok((0.0, 0.0));
        }
        let m = susceptibility(self.ops, s)?;
        let rate =
            m.lu()
                .solve(&Vector2::new(flux, -flux))
                .ok_or(Error::SingularSusceptibility {
                    condition: f64::INFINITY,
                    beta_z: s.beta_z,
                    beta_d: s.beta_d,
                })?;
        Ok((rate[0], rate[1]))
    }
}

pub fn ne_density(ops: &OperatorSet, s: ThermoState, epsilon: f64) -> Result<ComplexMatrix> {
    FluxModel::new(ops, epsilon)?.ne_density(s)
}

pub fn avg_flux(ops: &OperatorSet, s: ThermoState, epsilon: f64) -> Result<f64> {
    FluxModel::new(ops, epsilon)?.avg_flux(s)
}

pub fn rhs(ops: &OperatorSet, s: ThermoState, epsilon: f64) -> Result<(f64, f64)> {
    FluxModel::new(ops, epsilon)?.rhs(s)
}

/// `Tr(rho_qe K)`; vanishes for every state, which is why the correction `J` is needed.
pub fn qe_flux(ops: &OperatorSet, s: ThermoState) -> Result<f64> {
    let rho = qe_density(ops, s)?;
    Ok(expect(&rho, &ops.k))
}

/// Total secular energy `E_z + E_d`.
pub fn total_energy(ops: &OperatorSet, s: ThermoState) -> Result<f64> {
    let (ez, ed) = energies(ops, s)?;
    Ok(ez + ed)
}

/// Common inverse temperature with the same total energy as `s0`, by bisection on `[0, 10 max(beta)]`.
pub fn equilibrium_beta(ops: &OperatorSet, s0: ThermoState) -> Result<f64> {
    s0.check()?;
    if s0.beta_z == s0.beta_d {
        return Ok(s0.beta_z);
    }
    let target = total_energy(ops, s0)?;
    let excess = |beta: f64| -> Result<f64> {
        Ok(total_energy(ops, ThermoState::equilibrium(beta))? - target)
    };
    let mut lo = 0.0;
    let mut hi = 10.0 * s0.beta_z.max(s0.beta_d);
    let (g_lo, g_hi) = (excess(lo)?, excess(hi)?);
    if !(g_lo >= 0.0 && g_hi <= 0.0) {
        return Err(Error::Domain(format!(
            "total energy {target} outside the attainable range [{}, {}] for beta in [0, {hi}]",
            g_hi + target,
            g_lo + target
        )));
    }
    let goal = 1e-10 * target.abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = excess(mid)?;
        if g.abs() < goal || mid == lo || mid == hi {
            return Ok(mid);
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests;
