//! Dense complex operator algebra on the 2^N-dimensional spin-1/2 Hilbert space.
//!
//! Basis convention: computational basis with spin 1 as the most significant
//! bit, and bit value 0 meaning spin up (`I_z = +1/2`). Every other module
//! relies on this ordering, in particular the complex conjugation taken in
//! the concurrence formula.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest register size handled by the dense routines.
pub const MAX_SPINS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Dimension of the register, `2^spins`.
pub fn dim_for(spins: usize) -> usize {
    1 << spins
}

/// Recovers `N` from a square matrix dimension, if it is a power of two.
pub fn spins_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

fn check_site(site: usize, spins: usize) -> Result<()> {
    if site == 0 || site > spins {
        return Err(Error::Domain(format!("site {site} outside 1..={spins}")));
    }
    Ok(())
}

fn check_spins(spins: usize) -> Result<()> {
    if spins == 0 || spins > MAX_SPINS {
        return Err(Error::Domain(format!(
            "spin count {spins} outside 1..={MAX_SPINS}"
        )));
    }
    Ok(())
}

/// Bit mask selecting `site` (1-based) in a basis index.
#[inline]
pub(crate) fn site_mask(site: usize, spins: usize) -> usize {
    1 << (spins - site)
}

/// `I_{axis, site} = sigma_axis / 2` embedded in an `spins`-spin register.
pub fn spin_operator(axis: Axis, site: usize, spins: usize) -> Result<ComplexMatrix> {
    check_spins(spins)?;
    check_site(site, spins)?;
    let dim = dim_for(spins);
    let mask = site_mask(site, spins);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let down = col & mask != 0;
        match axis {
            Axis::Z => {
                out[(col, col)] = Complex64::new(if down { -0.5 } else { 0.5 }, 0.0);
            }
            Axis::X => {
                out[(col ^ mask, col)] = Complex64::new(0.5, 0.0);
            }
            Axis::Y => {
                // <up|sigma_y|down> = -i, <down|sigma_y|up> = +i
                out[(col ^ mask, col)] = Complex64::new(0.0, if down { -0.5 } else { 0.5 });
            }
        }
    }
    Ok(out)
}

/// Total `sum_j I_{axis, j}`.
pub fn total_spin(axis: Axis, spins: usize) -> Result<ComplexMatrix> {
    let dim = dim_for(spins);
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for site in 1..=spins {
        acc += spin_operator(axis, site, spins)?;
    }
    Ok(acc)
}

/// Largest entrywise deviation `|A_ab - conj(A_ba)|`.
pub fn hermiticity_error(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Validates squareness and Hermiticity within [`HERMITIAN_TOL`] relative to the Frobenius norm.
pub fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let asymmetry = hermiticity_error(a);
    let allowed = HERMITIAN_TOL * a.norm();
    if asymmetry > allowed {
        return Err(Error::NotHermitian { asymmetry, allowed });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    /// Column eigenvectors, unitary.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(E)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let w = f(e);
            scaled.column_mut(j).scale_mut(w);
        }
        &scaled * self.vectors.adjoint()
    }

    /// Rotates `op` into the eigenbasis: `V^dagger op V`.
    pub fn to_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.vectors.adjoint() * op * &self.vectors
    }

    /// Rotates `op` back from the eigenbasis: `V op V^dagger`.
    pub fn from_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        &self.vectors * op * self.vectors.adjoint()
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

pub fn herm_eig(a: &ComplexMatrix) -> Result<EigenSystem> {
    ensure_hermitian(a)?;
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenSystem { values, vectors })
}

pub fn mat_exp_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(a)?.map(f64::exp))
}

/// Normalized exponential `exp(A) / Tr exp(A)` together with `ln Tr exp(A)`.
///
/// The spectrum is shifted by its maximum before exponentiation, so
/// exponents of any magnitude stay representable.
pub fn normalized_exp(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let eig = herm_eig(a)?;
    let top = eig.max_value();
    let weights: Vec<f64> = eig.values.iter().map(|&e| (e - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut scaled = eig.vectors.clone();
    for (j, w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w / total);
    }
    let rho = &scaled * eig.vectors.adjoint();
    Ok((rho, top + total.ln()))
}

fn check_same_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dims(a, b)?;
    Ok(a * b - b * a)
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_same_dims(a, b)?;
    let n = a.nrows();
    let mut acc = ZERO;
    for r in 0..n {
        for c in 0..n {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    Ok(acc)
}

/// Reduced state of spins `m` and `n`, tracing out every other spin.
///
/// The retained two-spin basis is ordered `(m, n)` with `m` as the most
/// significant bit, so `(m, n)` and `(n, m)` differ by a SWAP.
pub fn partial_trace_pair(
    rho: &ComplexMatrix,
    m: usize,
    n: usize,
    spins: usize,
) -> Result<ComplexMatrix> {
    check_spins(spins)?;
    check_site(m, spins)?;
    check_site(n, spins)?;
    if m == n {
        return Err(Error::Domain(format!("pair ({m}, {n}) repeats a site")));
    }
    let dim = dim_for(spins);
    if rho.shape() != (dim, dim) {
        return Err(Error::Domain(format!(
            "state has shape {:?}, expected {dim}x{dim} for {spins} spins",
            rho.shape()
        )));
    }
    let mask_m = site_mask(m, spins);
    let mask_n = site_mask(n, spins);
    let embed = |k: usize, rest: usize| -> usize {
        let mut idx = rest;
        if k & 0b10 != 0 {
            idx |= mask_m;
        }
        if k & 0b01 != 0 {
            idx |= mask_n;
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(4, 4);
    for rest in (0..dim).filter(|i| i & (mask_m | mask_n) == 0) {
        for r in 0..4 {
            let a = embed(r, rest);
            for c in 0..4 {
                out[(r, c)] += rho[(a, embed(c, rest))];
            }
        }
    }
    Ok(out)
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli(axis: Axis) -> ComplexMatrix {
        spin_operator(axis, 1, 1).unwrap() * c(2.0, 0.0)
    }

    #[test]
    fn single_spin_z() {
        let z = spin_operator(Axis::Z, 1, 1).unwrap();
        let expected =
            ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(-0.5, 0.0)]));
        assert_eq!(z, expected);
    }

    #[test]
    fn x_on_second_of_two_is_block_antidiagonal() {
        let x = spin_operator(Axis::X, 2, 2).unwrap();
        let expected = ComplexMatrix::identity(2, 2).kronecker(&(pauli(Axis::X) * c(0.5, 0.0)));
        assert_eq!(x, expected);
        assert_eq!(x[(0, 1)], c(0.5, 0.0));
        assert_eq!(x[(2, 3)], c(0.5, 0.0));
        assert_eq!(x[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn y_matches_pauli_convention() {
        let y = pauli(Axis::Y);
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
    }

    #[test]
    fn z_squared_trace_on_four_spins() {
        let z = spin_operator(Axis::Z, 1, 4).unwrap();
        let t = trace_product(&z, &z).unwrap();
        assert!((t - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn embedded_operators_have_half_integer_spectrum() {
        for axis in Axis::ALL {
            for site in 1..=3 {
                let eig = herm_eig(&spin_operator(axis, site, 3).unwrap()).unwrap();
                for (i, &e) in eig.values.iter().enumerate() {
                    let want = if i < 4 { -0.5 } else { 0.5 };
                    assert!((e - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn site_out_of_range_is_rejected() {
        assert!(matches!(
            spin_operator(Axis::X, 0, 4),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            spin_operator(Axis::X, 5, 4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn eig_of_diagonal_sorts_ascending() {
        let a = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0)]));
        let eig = herm_eig(&a).unwrap();
        assert_eq!(eig.values.as_slice(), &[1.0, 3.0]);
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_sigma_x_gives_hadamard_columns() {
        let eig = herm_eig(&pauli(Axis::X)).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // columns equal (1,-1)/sqrt2 and (1,1)/sqrt2 up to a phase
        let v0 = eig.vectors.column(0);
        let v1 = eig.vectors.column(1);
        assert!(((v0[0] * v0[1].conj()).re + 0.5).abs() < 1e-14);
        assert!(((v1[0] * v1[1].conj()).re - 0.5).abs() < 1e-14);
        assert!((v0[0].norm() - s).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut a = ComplexMatrix::zeros(2, 2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exp_of_zero_and_log_diagonal() {
        let z = ComplexMatrix::zeros(4, 4);
        assert!(
            max_diff(
                &mat_exp_hermitian(&z).unwrap(),
                &ComplexMatrix::identity(4, 4)
            ) < 1e-15
        );
        let a = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![
            c(2f64.ln(), 0.0),
            c(3f64.ln(), 0.0),
        ]));
        let e = mat_exp_hermitian(&a).unwrap();
        assert!((e[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((e[(1, 1)].re - 3.0).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn normalized_exp_survives_huge_exponents() {
        let a = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![
            c(-2000.0, 0.0),
            c(-2001.0, 0.0),
        ]));
        let (rho, ln_z) = normalized_exp(&a).unwrap();
        let e = std::f64::consts::E;
        assert!((rho[(0, 0)].re - e / (e + 1.0)).abs() < 1e-14);
        assert!((ln_z - (-2000.0 + (1.0 + 1.0 / e).ln())).abs() < 1e-10);
    }

    #[test]
    fn commutator_of_paulis() {
        let xy = commutator(&pauli(Axis::X), &pauli(Axis::Y)).unwrap();
        let z2i = pauli(Axis::Z) * c(0.0, 2.0);
        assert!(max_diff(&xy, &z2i) < 1e-15);
        let x = pauli(Axis::X);
        assert!(commutator(&x, &x).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn trace_product_with_mixed_state() {
        let h = spin_operator(Axis::X, 1, 2).unwrap()
            + spin_operator(Axis::Z, 2, 2).unwrap() * c(3.0, 0.0)
            + ComplexMatrix::identity(4, 4) * c(1.5, 0.0);
        let mixed = ComplexMatrix::identity(4, 4) * c(0.25, 0.0);
        let t = trace_product(&mixed, &h).unwrap();
        assert!((t - trace(&h) * 0.25).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(4, 4);
        assert!(commutator(&a, &b).is_err());
        assert!(trace_product(&a, &b).is_err());
    }

    #[test]
    fn partial_trace_of_maximally_mixed_and_product_states() {
        let mixed = ComplexMatrix::identity(16, 16) * c(1.0 / 16.0, 0.0);
        let reduced = partial_trace_pair(&mixed, 2, 4, 4).unwrap();
        assert!(max_diff(&reduced, &(ComplexMatrix::identity(4, 4) * c(0.25, 0.0))) < 1e-15);

        let mut all_up = ComplexMatrix::zeros(16, 16);
        all_up[(0, 0)] = c(1.0, 0.0);
        let reduced = partial_trace_pair(&all_up, 1, 2, 4).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(0, 0)] = c(1.0, 0.0);
        assert_eq!(reduced, want);
    }

    #[test]
    fn partial_trace_orders_first_site_as_high_bit() {
        // |0100>: spin 2 down, others up
        let mut rho = ComplexMatrix::zeros(16, 16);
        rho[(0b0100, 0b0100)] = c(1.0, 0.0);
        let r12 = partial_trace_pair(&rho, 1, 2, 4).unwrap();
        let r21 = partial_trace_pair(&rho, 2, 1, 4).unwrap();
        assert_eq!(r12[(0b01, 0b01)], c(1.0, 0.0));
        assert_eq!(r21[(0b10, 0b10)], c(1.0, 0.0));
    }

    #[test]
    fn partial_trace_rejects_bad_pairs() {
        let rho = ComplexMatrix::identity(16, 16);
        assert!(partial_trace_pair(&rho, 2, 2, 4).is_err());
        assert!(partial_trace_pair(&rho, 0, 2, 4).is_err());
        assert!(partial_trace_pair(&rho, 1, 5, 4).is_err());
        assert!(partial_trace_pair(&rho, 1, 2, 3).is_err());
    }
}
