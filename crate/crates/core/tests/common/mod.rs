#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spinthermo::operator::ComplexMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        m[(r, r)] = c(rng.random_range(-1.0..1.0), 0.0);
        for col in r + 1..dim {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(r, col)] = z;
            m[(col, r)] = z.conj();
        }
    }
    m
}

/// Random normalized ket; uniform box sampling, not Haar.
pub fn random_ket(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn projector(psi: &[Complex64]) -> ComplexMatrix {
    let n = psi.len();
    ComplexMatrix::from_fn(n, n, |r, col| psi[r] * psi[col].conj())
}

pub fn bit(idx: usize, site: usize, spins: usize) -> usize {
    (idx >> (spins - site)) & 1
}

/// `pair` on sites `(m, n)` (amplitude index `2 a_m + a_n`), single-spin kets elsewhere.
pub fn embed_pair(
    pair: &[Complex64],
    m: usize,
    n: usize,
    others: &[Vec<Complex64>],
    spins: usize,
) -> Vec<Complex64> {
    let mut rest = others.iter();
    let singles: Vec<Option<&Vec<Complex64>>> = (1..=spins)
        .map(|s| if s == m || s == n { None } else { rest.next() })
        .collect();
    (0..1 << spins)
        .map(|idx| {
            let mut amp = pair[2 * bit(idx, m, spins) + bit(idx, n, spins)];
            for (s, single) in singles.iter().enumerate() {
                if let Some(k) = single {
                    amp *= k[bit(idx, s + 1, spins)];
                }
            }
            amp
        })
        .collect()
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
pub fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of a Hermitian matrix via its real embedding `[[Re, -Im], [Im, Re]]`,
/// which repeats each eigenvalue twice.
pub fn hermitian_eigenvalues_oracle(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.nrows();
    let emb = DMatrix::from_fn(2 * n, 2 * n, |r, col| {
        let z = h[(r % n, col % n)];
        match (r < n, col < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    jacobi_eigenvalues(emb).into_iter().step_by(2).collect()
}
