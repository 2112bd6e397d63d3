//! Dense symmetric eigen-solvers: cyclic Jacobi for small matrices and plain
//! power iteration for the dominant pair.

use crate::error::{Error, Result};
use crate::linalg::matrix::SymmetricMatrix;
use crate::linalg::operator::{Affine, SymmetricOperator};
use crate::linalg::vector::{dot, normalize};

/// Full eigen-decomposition with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector of `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricEigen {
    /// Largest eigenvalue in absolute value, with its eigenvector.
    pub fn dominant(&self) -> (f64, &[f64]) {
        let i = (0..self.values.len())
            .max_by(|&a, &b| {
                self.values[a]
                    .abs()
                    .partial_cmp(&self.values[b].abs())
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        (self.values[i], &self.vectors[i])
    }

    /// `max |lambda_i|`.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-15;

/// Cyclic Jacobi on a row-major `n x n` symmetric array. Sweeps until the
/// off-diagonal Frobenius norm drops below `1e-15 * ||A||_F` (comfortably
/// under the `1e-12` the oracles need).
pub fn jacobi_eigen(a: &[f64], n: usize) -> SymmetricEigen {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_REL_TOL * frob;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap().then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&c| {
            let mut col: Vec<f64> = (0..n).map(|r| v[r * n + c]).collect();
            orient(&mut col);
            col
        })
        .collect();
    SymmetricEigen { values, vectors }
}

/// Full spectrum of a symmetric matrix via Jacobi.
pub fn symmetric_eigen(a: &SymmetricMatrix) -> SymmetricEigen {
    jacobi_eigen(&a.to_dense_vec(), a.dim())
}

/// Flips `x` so that its first nonzero component is positive.
pub fn orient(x: &mut [f64]) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Dominant eigenpair (largest `|lambda|`) by power iteration from the
/// normalized all-ones vector.
pub fn dominant_eigenpair(a: &SymmetricMatrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let p = a.dim();
    dominant_eigenpair_from(a, &vec![1.0; p], tol, max_iter)
}

/// Power iteration from an explicit seed. Stops once
/// `||A x - (x^T A x) x|| <= tol * max(1, |lambda|)`.
pub fn dominant_eigenpair_from<O: SymmetricOperator + ?Sized>(
    a: &O,
    seed: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let p = a.dim();
    if seed.len() != p {
        return Err(Error::invalid("seed length does not match matrix dimension"));
    }
    let mut x = seed.to_vec();
    if normalize(&mut x) == 0.0 {
        return Err(Error::invalid("seed vector is zero"));
    }
    let mut y = vec![0.0; p];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        a.apply(&x, &mut y);
        let lambda = dot(&x, &y);
        residual = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| (yi - lambda * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * lambda.abs().max(1.0) {
            orient(&mut x);
            return Ok((lambda, x));
        }
        if normalize(&mut y) == 0.0 {
            orient(&mut x);
            return Ok((0.0, x));
        }
        std::mem::swap(&mut x, &mut y);
    }
    Err(Error::ConvergenceFailure {
        iterations: max_iter,
        residual,
        last_iterate: x,
    })
}

/// Dimension up to which [`leading_eigenpair`] uses Jacobi.
const JACOBI_LIMIT: usize = 160;

/// Algebraically largest eigenvalue and its unit eigenvector (the `x(F)`
/// of a principal submatrix). Jacobi for small matrices, shifted power
/// iteration otherwise.
pub fn leading_eigenpair(a: &SymmetricMatrix) -> Result<(f64, Vec<f64>)> {
    if a.dim() <= JACOBI_LIMIT {
        let e = symmetric_eigen(a);
        return Ok((e.values[0], e.vectors[0].clone()));
    }
    let shift = SymmetricOperator::psd_shift(a);
    let shifted = Affine::shifted(a, shift);
    let (lambda, x) = dominant_eigenpair_from(&shifted, &vec![1.0; a.dim()], 1e-10, 20_000)?;
    Ok((lambda - shift, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dominant_examples() {
        let d = SymmetricMatrix::diag(&[3.0, 2.0, 1.0]).unwrap();
        let (l, v) = dominant_eigenpair(&d, 1e-12, 10_000).unwrap();
        assert!((l - 3.0).abs() < 1e-10);
        assert!((v[0] - 1.0).abs() < 1e-8 && v[1].abs() < 1e-5);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = SymmetricMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let (l, v) = dominant_eigenpair(&a, 1e-12, 1000).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
        assert!((v[0] - h).abs() < 1e-12 && (v[1] - h).abs() < 1e-12);

        let swap = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let (l, v) = dominant_eigenpair(&swap, 1e-12, 1000).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!((v[0] - h).abs() < 1e-12 && (v[1] - h).abs() < 1e-12);
    }

    #[test]
    fn oscillating_seed_reports_convergence_failure() {
        // +1 and -1 tie in magnitude, so the iteration bounces between e1 and e2.
        let swap = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        match dominant_eigenpair_from(&swap, &[1.0, 0.0], 1e-9, 50) {
            Err(Error::ConvergenceFailure {
                iterations,
                residual,
                last_iterate,
            }) => {
                assert_eq!(iterations, 50);
                assert!(residual > 0.5);
                assert_eq!(last_iterate.len(), 2);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn dominant_sign_convention() {
        let a = SymmetricMatrix::from_rows(&[[1.0, -2.0], [-2.0, 1.0]]).unwrap();
        let (l, v) = dominant_eigenpair_from(&a, &[1.0, -0.5], 1e-12, 1000).unwrap();
        assert!((l - 3.0).abs() < 1e-10);
        assert!(v[0] > 0.0 && v[1] < 0.0);
    }

    #[test]
    fn jacobi_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [1usize, 2, 3, 7, 12, 25] {
            let a = SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-2.0..2.0)).unwrap();
            let e = symmetric_eigen(&a);
            let m = DMatrix::from_row_slice(n, n, &a.to_dense_vec());
            let mut reference: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|x, y| y.partial_cmp(x).unwrap());
            for (x, y) in e.values.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-11, "{x} vs {y}");
            }
            for (l, v) in e.values.iter().zip(&e.vectors) {
                let av = a.matvec(v).unwrap();
                let r: f64 = av.iter().zip(v).map(|(p, q)| (p - l * q).powi(2)).sum::<f64>().sqrt();
                assert!(r < 1e-11);
            }
        }
    }

    #[test]
    fn leading_pair_picks_algebraic_maximum() {
        let d = SymmetricMatrix::diag(&[-5.0, 2.0]).unwrap();
        let (l, v) = leading_eigenpair(&d).unwrap();
        assert_eq!(l, 2.0);
        assert_eq!(v, vec![0.0, 1.0]);
    }
}
