//! Zeeman, dipolar, secular and non-secular Hamiltonians of a spin cluster,
//! and the Zeeman energy-flux operator.
//!
//! Dimensionless units: the nearest-neighbour dipolar constant is one and
//! the Zeeman splitting is set through the ratio `omega_0 / omega_d`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SpinGeometry;
use crate::operator::{
    commutator, dim_for, herm_eig, spin_operator, total_spin, trace_product, Axis, ComplexMatrix,
    EigenSystem,
};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `H_z = -omega_0 sum_j I_zj`.
pub fn build_zeeman(geom: &SpinGeometry, omega0: f64) -> Result<ComplexMatrix> {
    if !(omega0.is_finite() && omega0 >= 0.0) {
        return Err(Error::Domain(format!(
            "omega_0 = {omega0} must be finite and >= 0"
        )));
    }
    Ok(total_spin(Axis::Z, geom.spins())? * real(-omega0))
}

/// `sum_alpha I_alpha,j I_alpha,k`.
fn spin_dot(j: usize, k: usize, spins: usize) -> Result<ComplexMatrix> {
    let dim = dim_for(spins);
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for axis in Axis::ALL {
        acc += spin_operator(axis, j, spins)? * spin_operator(axis, k, spins)?;
    }
    Ok(acc)
}

/// Projection `I_j . n` of spin `site` on direction `n`.
fn spin_along(n: [f64; 3], site: usize, spins: usize) -> Result<ComplexMatrix> {
    let dim = dim_for(spins);
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (axis, c) in Axis::ALL.into_iter().zip(n) {
        if c != 0.0 {
            acc += spin_operator(axis, site, spins)? * real(c);
        }
    }
    Ok(acc)
}

/// Full dipolar interaction `H_dd = -sum_{j<k} D_jk [3 (I_j.r)(I_k.r) - I_j.I_k]`.
pub fn build_dipolar_full(geom: &SpinGeometry) -> Result<ComplexMatrix> {
    let spins = geom.spins();
    let dim = dim_for(spins);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for p in geom.pairs() {
        let n = p.direction();
        let aligned = spin_along(n, p.j, spins)? * spin_along(n, p.k, spins)?;
        let term = aligned * real(3.0) - spin_dot(p.j, p.k, spins)?;
        h -= term * real(p.d);
    }
    Ok(h)
}

/// Angular factor of the secular coupling, `(1 - 3 cos^2 theta) / 2`.
pub fn secular_factor(theta: f64) -> f64 {
    let c = theta.cos();
    0.5 * (1.0 - 3.0 * c * c)
}

/// Secular part of `H_dd`: `H_d = sum_{j<k} D_jk (1 - 3cos^2 theta_jk)/2 (3 I_zj I_zk - I_j.I_k)`.
///
/// This is exactly the block of `H_dd` that conserves total `I_z`.
pub fn build_secular(geom: &SpinGeometry) -> Result<ComplexMatrix> {
    let spins = geom.spins();
    let dim = dim_for(spins);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for p in geom.pairs() {
        let zz = spin_operator(Axis::Z, p.j, spins)? * spin_operator(Axis::Z, p.k, spins)?;
        let term = zz * real(3.0) - spin_dot(p.j, p.k, spins)?;
        h += term * real(p.d * secular_factor(p.theta));
    }
    Ok(h)
}

/// Dipolar energy scale `sqrt(Tr H_dd^2 / Tr (sum_j I_zj)^2)`.
pub fn omega_d(geom: &SpinGeometry) -> Result<f64> {
    let hdd = build_dipolar_full(geom)?;
    let iz = total_spin(Axis::Z, geom.spins())?;
    let num = trace_product(&hdd, &hdd)?.re;
    let den = trace_product(&iz, &iz)?.re;
    Ok((num / den).sqrt())
}

/// The assembled operators of one cluster at one field strength.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub spins: usize,
    pub hz: ComplexMatrix,
    pub hdd: ComplexMatrix,
    pub hd: ComplexMatrix,
    pub hnd: ComplexMatrix,
    pub h: ComplexMatrix,
    /// Zeeman energy flux `i[H, H_z]`.
    pub k: ComplexMatrix,
    pub omega0: f64,
    pub omega_d: f64,
    pub eig_h: EigenSystem,
}

impl OperatorSet {
    /// Builds every operator with `omega_0 = ratio * omega_d(geom)`.
    pub fn from_ratio(geom: &SpinGeometry, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::Domain(format!(
                "ratio {ratio} must be finite and >= 0"
            )));
        }
        let wd = omega_d(geom)?;
        Self::with_omega0(geom, ratio * wd)
    }

    pub fn with_omega0(geom: &SpinGeometry, omega0: f64) -> Result<Self> {
        let hz = build_zeeman(geom, omega0)?;
        let hdd = build_dipolar_full(geom)?;
        let hd = build_secular(geom)?;
        let hnd = &hdd - &hd;
        let h = &hz + &hdd;
        let eig_h = herm_eig(&h)?;
        let k = commutator(&h, &hz)? * Complex64::i();
        let omega_d = omega_d(geom)?;
        Ok(OperatorSet {
            spins: geom.spins(),
            hz,
            hdd,
            hd,
            hnd,
            h,
            k,
            omega0,
            omega_d,
            eig_h,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn ratio(&self) -> f64 {
        self.omega0 / self.omega_d
    }

    pub fn get(&self, name: OperatorName) -> &ComplexMatrix {
        match name {
            OperatorName::Hz => &self.hz,
            OperatorName::Hdd => &self.hdd,
            OperatorName::Hd => &self.hd,
            OperatorName::Hnd => &self.hnd,
            OperatorName::H => &self.h,
            OperatorName::K => &self.k,
        }
    }
}

/// Recomputes the energy-flux operator `K = dH_z/dt = i[H, H_z]`.
pub fn flux_operator(ops: &OperatorSet) -> Result<ComplexMatrix> {
    Ok(commutator(&ops.h, &ops.hz)? * Complex64::i())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorName {
    Hz,
    Hdd,
    Hd,
    Hnd,
    H,
    K,
}

impl OperatorName {
    pub const ALL: [OperatorName; 6] = [
        OperatorName::Hz,
        OperatorName::Hdd,
        OperatorName::Hd,
        OperatorName::Hnd,
        OperatorName::H,
        OperatorName::K,
    ];
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorName::Hz => "Hz",
            OperatorName::Hdd => "Hdd",
            OperatorName::Hd => "Hd",
            OperatorName::Hnd => "Hnd",
            OperatorName::H => "H",
            OperatorName::K => "K",
        })
    }
}

impl FromStr for OperatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorName::ALL
            .into_iter()
            .find(|n| n.to_string() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown operator '{s}' (expected one of Hz, Hdd, Hd, Hnd, H, K)"
                ))
            })
    }
}
