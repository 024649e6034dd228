//! Wootters concurrence of spin pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{herm_eig, partial_trace_pair, spins_for_dim, ComplexMatrix};

/// Negative eigenvalues of the reduced state down to this are rounding and get
/// clamped to zero; anything lower means the input was not a density matrix.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PairConcurrence {
    /// Sites `(m, n)` with `m < n`.
    pub pair: (usize, usize),
    pub value: f64,
    /// Square roots of the eigenvalues of `R`, descending.
    pub lambdas: [f64; 4],
}

/// `sigma_y (x) sigma_y`, which is real.
fn spin_flip() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4, 4);
    let one = Complex64::new(1.0, 0.0);
    s[(0, 3)] = -one;
    s[(3, 0)] = -one;
    s[(1, 2)] = one;
    s[(2, 1)] = one;
    s
}

/// Concurrence spectrum of a two-spin density matrix (4x4, basis `|uu>, |ud>, |du>, |dd>`).
///
/// The `lambda_k` are the square roots of the eigenvalues of
/// `R = rho S conj(rho) S`. With `rho = V P V^dag` they are the singular values of
/// `sqrt(P) V^T S V sqrt(P)`, which shares its spectrum with the Hermitian
/// `sqrt(rho) S conj(rho) S sqrt(rho)` but stays accurate for rank-deficient states.
pub fn concurrence_two_spin(rho: &ComplexMatrix) -> Result<[f64; 4]> {
    if rho.shape() != (4, 4) {
        return Err(Error::Domain(format!(
            "two-spin state must be 4x4, got {:?}",
            rho.shape()
        )));
    }
    let eig = herm_eig(rho)?;
    if eig.min_value() < -DEGENERACY_TOL {
        return Err(Error::NumericalDegeneracy(format!(
            "reduced state has eigenvalue {:e}",
            eig.min_value()
        )));
    }
    let mut w = eig.vectors.clone();
    for (mut col, &p) in w.column_iter_mut().zip(eig.values.iter()) {
        col *= Complex64::new(p.max(0.0).sqrt(), 0.0);
    }
    let tau = w.transpose() * spin_flip() * &w;
    let mut lambdas = [0.0; 4];
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    lambdas.copy_from_slice(&sv);
    Ok(lambdas)
}

fn value_from(lambdas: &[f64; 4]) -> f64 {
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// Concurrence between spins `m` and `n` of an `N`-spin state.
pub fn concurrence_pair(rho: &ComplexMatrix, m: usize, n: usize) -> Result<PairConcurrence> {
    let spins = spins_for_dim(rho.nrows())
        .ok_or_else(|| Error::Domain(format!("dimension {} is not a power of two", rho.nrows())))?;
    let (lo, hi) = if m < n { (m, n) } else { (n, m) };
    let reduced = partial_trace_pair(rho, lo, hi, spins)?;
    let lambdas = concurrence_two_spin(&reduced)?;
    Ok(PairConcurrence {
        pair: (lo, hi),
        value: value_from(&lambdas),
        lambdas,
    })
}

/// Every pair `j < k`, in lexicographic order.
pub fn concurrence_all(rho: &ComplexMatrix) -> Result<Vec<PairConcurrence>> {
    let spins = spins_for_dim(rho.nrows())
        .ok_or_else(|| Error::Domain(format!("dimension {} is not a power of two", rho.nrows())))?;
    let mut out = Vec::with_capacity(spins * (spins - 1) / 2);
    for j in 1..=spins {
        for k in j + 1..=spins {
            out.push(concurrence_pair(rho, j, k)?);
        }
    }
    Ok(out)
}
