//! Matrix-free access to symmetric matrices.
//!
//! The solvers only need products, the diagonal and a bound telling them how
//! far to shift for positive semidefiniteness, so they are written against
//! [`SymmetricOperator`]. Besides [`SymmetricMatrix`] this lets a covariance
//! `D^T D` be applied as `D^T (D x)` without forming it.

use crate::linalg::matrix::SymmetricMatrix;
use crate::linalg::vector::IndexSet;
use crate::error::Result;

pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `out = A x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn entry(&self, i: usize, j: usize) -> f64;

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i)).collect()
    }

    /// A value `s >= 0` such that `A + sI` is positive semidefinite.
    fn psd_shift(&self) -> f64;

    /// An upper bound on the spectral radius.
    fn radius_bound(&self) -> f64;

    /// Upper bound on `lambda_max(A)`.
    fn upper_bound(&self) -> f64 {
        self.radius_bound()
    }

    fn principal_submatrix(&self, f: &IndexSet) -> Result<SymmetricMatrix> {
        f.check_bound(self.dim())?;
        let idx = f.as_slice();
        SymmetricMatrix::from_fn(idx.len(), |a, b| self.entry(idx[a], idx[b]))
    }
}

impl SymmetricOperator for SymmetricMatrix {
    fn dim(&self) -> usize {
        SymmetricMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec_into(x, out)
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        SymmetricMatrix::entry(self, i, j)
    }

    fn diagonal(&self) -> Vec<f64> {
        SymmetricMatrix::diagonal(self)
    }

    fn psd_shift(&self) -> f64 {
        self.gershgorin_shift_bound()
    }

    fn radius_bound(&self) -> f64 {
        self.max_abs_row_sum()
    }

    fn upper_bound(&self) -> f64 {
        self.gershgorin_upper_bound()
    }

    fn principal_submatrix(&self, f: &IndexSet) -> Result<SymmetricMatrix> {
        SymmetricMatrix::principal_submatrix(self, f)
    }
}

/// `scale * A + shift * I` over a borrowed operator.
#[derive(Debug, Clone, Copy)]
pub struct Affine<'a, O: ?Sized> {
    pub inner: &'a O,
    pub scale: f64,
    pub shift: f64,
}

impl<'a, O: SymmetricOperator + ?Sized> Affine<'a, O> {
    pub fn shifted(inner: &'a O, shift: f64) -> Self {
        Affine {
            inner,
            scale: 1.0,
            shift,
        }
    }

    /// `c I - A`.
    pub fn reflected(inner: &'a O, c: f64) -> Self {
        Affine {
            inner,
            scale: -1.0,
            shift: c,
        }
    }
}

impl<O: SymmetricOperator + ?Sized> SymmetricOperator for Affine<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply(x, out);
        for (o, v) in out.iter_mut().zip(x) {
            *o = self.scale * *o + self.shift * v;
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let d = if i == j { self.shift } else { 0.0 };
        self.scale * self.inner.entry(i, j) + d
    }

    fn diagonal(&self) -> Vec<f64> {
        self.inner
            .diagonal()
            .into_iter()
            .map(|d| self.scale * d + self.shift)
            .collect()
    }

    fn psd_shift(&self) -> f64 {
        let s = if self.scale >= 0.0 {
            self.scale * self.inner.psd_shift()
        } else {
            -self.scale * self.inner.upper_bound()
        };
        (s - self.shift).max(0.0)
    }

    fn radius_bound(&self) -> f64 {
        self.scale.abs() * self.inner.radius_bound() + self.shift.abs()
    }

    fn upper_bound(&self) -> f64 {
        if self.scale >= 0.0 {
            self.scale * self.inner.upper_bound() + self.shift
        } else {
            self.radius_bound()
        }
    }
}

/// The Gram operator `D^T D` of a row-major `n x p` data matrix, applied as
/// `D^T (D x)`.
#[derive(Debug, Clone, Copy)]
pub struct GramOperator<'a> {
    data: &'a [f64],
    rows: usize,
    cols: usize,
    scale: f64,
}

impl<'a> GramOperator<'a> {
    /// `scale * D^T D` for row-major `data` with `cols` columns.
    pub fn new(data: &'a [f64], rows: usize, cols: usize, scale: f64) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        GramOperator {
            data,
            rows,
            cols,
            scale,
        }
    }

    /// Number of samples behind the operator.
    pub fn rows(&self) -> usize {
        self.rows
    }
}

impl SymmetricOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for row in self.data.chunks_exact(self.cols) {
            let t = self.scale * crate::linalg::vector::dot(row, x);
            if t != 0.0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o += t * r;
                }
            }
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.scale
            * self
                .data
                .chunks_exact(self.cols)
                .map(|r| r[i] * r[j])
                .sum::<f64>()
    }

    fn psd_shift(&self) -> f64 {
        0.0
    }

    /// The trace bounds the spectral radius of a PSD matrix.
    fn radius_bound(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols) {
            for (o, r) in d.iter_mut().zip(row) {
                *o += r * r;
            }
        }
        d.iter_mut().for_each(|v| *v *= self.scale);
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_operator_matches_explicit_product() {
        let d = [1.0, 2.0, 0.0, -1.0, 0.5, 3.0];
        let g = GramOperator::new(&d, 2, 3, 1.0);
        let x = [0.3, -0.2, 0.9];
        let mut y = [0.0; 3];
        g.apply(&x, &mut y);
        for i in 0..3 {
            let want: f64 = (0..3).map(|j| g.entry(i, j) * x[j]).sum();
            assert!((y[i] - want).abs() < 1e-14);
        }
        assert_eq!(g.diagonal(), vec![2.0, 4.25, 9.0]);
    }

    #[test]
    fn affine_wrapper() {
        let a = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = Affine::shifted(&a, 2.0);
        let mut out = [0.0; 2];
        s.apply(&[1.0, 0.0], &mut out);
        assert_eq!(out, [2.0, 1.0]);
        assert_eq!(s.psd_shift(), 0.0);
        let r = Affine::reflected(&a, 1.0);
        assert_eq!(r.entry(0, 1), -1.0);
        assert_eq!(r.diagonal(), vec![1.0, 1.0]);
    }
}
