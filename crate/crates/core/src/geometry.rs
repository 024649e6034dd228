//! Spin cluster geometries: pairwise dipolar coupling magnitudes and the
//! spherical angles of each inter-spin vector.
//!
//! Couplings are dimensionless, with the nearest-neighbour coupling equal to
//! one in every built-in geometry. The sign and prefactor of the dipolar
//! interaction live in [`crate::hamiltonian`].

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::MAX_SPINS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryLabel {
    Chain,
    Ring,
    Rectangle,
    Custom,
}

impl fmt::Display for GeometryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryLabel::Chain => "chain",
            GeometryLabel::Ring => "ring",
            GeometryLabel::Rectangle => "rectangle",
            GeometryLabel::Custom => "custom",
        })
    }
}

impl FromStr for GeometryLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(GeometryLabel::Chain),
            "ring" => Ok(GeometryLabel::Ring),
            "rectangle" => Ok(GeometryLabel::Rectangle),
            "custom" => Ok(GeometryLabel::Custom),
            _ => Err(Error::Config(format!(
                "unknown geometry '{s}' (expected chain, ring, rectangle or custom)"
            ))),
        }
    }
}

/// Coupling between spins `j < k` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub j: usize,
    pub k: usize,
    /// Dimensionless coupling magnitude, `> 0`.
    pub d: f64,
    /// Polar angle to the field axis.
    pub theta: f64,
    /// Azimuth.
    pub phi: f64,
}

impl Coupling {
    /// Unit vector along the inter-spin axis.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinGeometry {
    spins: usize,
    pairs: Vec<Coupling>,
    label: GeometryLabel,
}

impl SpinGeometry {
    /// Validates a pair list: every `j < k` present exactly once, positive
    /// couplings, finite angles.
    pub fn new(spins: usize, mut pairs: Vec<Coupling>, label: GeometryLabel) -> Result<Self> {
        if !(2..=MAX_SPINS).contains(&spins) {
            return Err(Error::Domain(format!(
                "geometry needs 2..={MAX_SPINS} spins, got {spins}"
            )));
        }
        let expected = spins * (spins - 1) / 2;
        if pairs.len() != expected {
            return Err(Error::Domain(format!(
                "{spins} spins need {expected} pairs, got {}",
                pairs.len()
            )));
        }
        pairs.sort_by_key(|p| (p.j, p.k));
        for w in pairs.windows(2) {
            if (w[0].j, w[0].k) == (w[1].j, w[1].k) {
                return Err(Error::Domain(format!(
                    "pair ({}, {}) listed twice",
                    w[0].j, w[0].k
                )));
            }
        }
        for p in &pairs {
            if p.j == 0 || p.j >= p.k || p.k > spins {
                return Err(Error::Domain(format!(
                    "pair ({}, {}) must satisfy 1 <= j < k <= {spins}",
                    p.j, p.k
                )));
            }
            if !(p.d.is_finite() && p.d > 0.0) {
                return Err(Error::Domain(format!(
                    "coupling D_{}{} = {} must be finite and positive",
                    p.j, p.k, p.d
                )));
            }
            if !(p.theta.is_finite() && p.phi.is_finite()) {
                return Err(Error::Domain(format!(
                    "angles of pair ({}, {}) must be finite",
                    p.j, p.k
                )));
            }
        }
        Ok(SpinGeometry {
            spins,
            pairs,
            label,
        })
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    /// Pairs sorted by `(j, k)`.
    pub fn pairs(&self) -> &[Coupling] {
        &self.pairs
    }

    pub fn label(&self) -> GeometryLabel {
        self.label
    }

    pub fn coupling(&self, j: usize, k: usize) -> Option<&Coupling> {
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        self.pairs.iter().find(|p| p.j == j && p.k == k)
    }

    /// Same geometry with every coupling multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Coupling {
                d: p.d * factor,
                ..*p
            })
            .collect();
        SpinGeometry::new(self.spins, pairs, self.label)
    }

    /// Same couplings with every polar angle replaced by `theta`.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Coupling { theta, ..*p })
            .collect();
        SpinGeometry::new(self.spins, pairs, GeometryLabel::Custom)
    }

    pub fn builtin(label: GeometryLabel, spins: usize) -> Result<Self> {
        match label {
            GeometryLabel::Chain => build_chain(spins),
            GeometryLabel::Ring => build_ring(spins),
            GeometryLabel::Rectangle if spins == 4 => Ok(build_rectangle()),
            GeometryLabel::Rectangle => Err(Error::Domain(format!(
                "the rectangle has 4 spins, not {spins}"
            ))),
            GeometryLabel::Custom => Err(Error::Domain(
                "custom geometries need an explicit pair list".into(),
            )),
        }
    }
}

fn all_pairs(spins: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=spins).flat_map(move |j| (j + 1..=spins).map(move |k| (j, k)))
}

/// Linear chain perpendicular to the field, `D_jk = |j - k|^-3`.
pub fn build_chain(spins: usize) -> Result<SpinGeometry> {
    if spins < 2 {
        return Err(Error::Domain(format!(
            "a chain needs at least 2 spins, got {spins}"
        )));
    }
    let pairs = all_pairs(spins)
        .map(|(j, k)| Coupling {
            j,
            k,
            d: ((k - j) as f64).powi(-3),
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        })
        .collect();
    SpinGeometry::new(spins, pairs, GeometryLabel::Chain)
}

/// Regular polygon in the plane perpendicular to the field.
///
/// `D_jk = (sin(pi/N) / sin(pi |j-k| / N))^3`. The azimuth is the direction
/// from spin `j` to spin `k`, with the first edge along `+y` and the
/// polygon traversed counter-clockwise; for `N = 4` this is the tabulated
/// square (`phi_12 = pi/2`, `phi_23 = phi_14 = pi`, `phi_34 = 3pi/2`,
/// `phi_13 = 3pi/4`, `phi_24 = 5pi/4`), which is used verbatim.
pub fn build_ring(spins: usize) -> Result<SpinGeometry> {
    if spins < 3 {
        return Err(Error::Domain(format!(
            "a ring needs at least 3 spins, got {spins}"
        )));
    }
    let n = spins as f64;
    let nearest = (PI / n).sin();
    let pairs = all_pairs(spins)
        .map(|(j, k)| {
            let sep = (k - j) as f64;
            let chord = (PI * sep / n).sin();
            Coupling {
                j,
                k,
                d: (nearest / chord).powi(3),
                theta: FRAC_PI_2,
                phi: if spins == 4 {
                    square_azimuth(j, k)
                } else {
                    polygon_azimuth(j, k, spins)
                },
            }
        })
        .collect();
    SpinGeometry::new(spins, pairs, GeometryLabel::Ring)
}

fn square_azimuth(j: usize, k: usize) -> f64 {
    match (j, k) {
        (1, 2) => FRAC_PI_2,
        (2, 3) | (1, 4) => PI,
        (3, 4) => 3.0 * FRAC_PI_2,
        (1, 3) => 3.0 * PI / 4.0,
        (2, 4) => 5.0 * PI / 4.0,
        _ => unreachable!("square has four sites"),
    }
}

fn polygon_azimuth(j: usize, k: usize, spins: usize) -> f64 {
    let step = 2.0 * PI / spins as f64;
    let vertex = |i: usize| {
        // vertex i sits at the end of edges 1..i-1
        (1..i).fold((0.0_f64, 0.0_f64), |(x, y), e| {
            let dir = FRAC_PI_2 + (e - 1) as f64 * step;
            (x + dir.cos(), y + dir.sin())
        })
    };
    let (xj, yj) = vertex(j);
    let (xk, yk) = vertex(k);
    (yk - yj).atan2(xk - xj).rem_euclid(2.0 * PI)
}

/// Planar rectangle with sides `1` and `sqrt 3`, spins numbered around the perimeter.
pub fn build_rectangle() -> SpinGeometry {
    let side = 1.0 / (3.0 * 3f64.sqrt());
    let diagonal = 0.125;
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let table = [
        (1, 2, 1.0, FRAC_PI_2),
        (1, 3, diagonal, (-half_sqrt3).acos()),
        (1, 4, side, PI),
        (2, 3, side, PI),
        (2, 4, diagonal, half_sqrt3.acos() + PI),
        (3, 4, 1.0, 3.0 * FRAC_PI_2),
    ];
    let pairs = table
        .iter()
        .map(|&(j, k, d, phi)| Coupling {
            j,
            k,
            d,
            theta: FRAC_PI_2,
            phi,
        })
        .collect();
    SpinGeometry::new(4, pairs, GeometryLabel::Rectangle).expect("rectangle table is valid")
}
