//! Symmetric matrices in dense row-major or compressed sparse row storage.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::vector::{dot, IndexSet};

/// Matrices up to this dimension are stored densely under [`StoragePolicy::Auto`].
pub const DENSE_LIMIT: usize = 2048;

/// Relative symmetry tolerance applied at construction (times `max |A_ij|`).
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoragePolicy {
    #[default]
    Auto,
    Dense,
    Sparse,
}

impl StoragePolicy {
    fn dense_for(self, p: usize) -> bool {
        match self {
            StoragePolicy::Auto => p <= DENSE_LIMIT,
            StoragePolicy::Dense => true,
            StoragePolicy::Sparse => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Csr {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Sparse(Csr),
}

/// Square real symmetric matrix. Immutable once built; `entry(i, j)` and
/// `entry(j, i)` are bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    storage: Storage,
}

impl SymmetricMatrix {
    /// Builds from a row-major `p x p` array using the default tolerance.
    pub fn from_dense(p: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_dense_with(p, data, None, StoragePolicy::Auto)
    }

    /// Builds from a row-major array. Pairs with `|A_ij - A_ji| <= tol` are
    /// averaged; anything larger is rejected. `tol = None` means
    /// `DEFAULT_SYMMETRY_TOL * max |A_ij|`.
    pub fn from_dense_with(
        p: usize,
        mut data: Vec<f64>,
        tol: Option<f64>,
        policy: StoragePolicy,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if data.len() != p * p {
            return Err(Error::invalid(format!(
                "expected {} entries for a {p}x{p} matrix, got {}",
                p * p,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite entry {bad}")));
        }
        let max_abs = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = tol.unwrap_or(DEFAULT_SYMMETRY_TOL * max_abs);
        let mut worst = (0.0f64, 0, 0);
        for i in 0..p {
            for j in (i + 1)..p {
                let d = (data[i * p + j] - data[j * p + i]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        if worst.0 > tol {
            return Err(Error::Asymmetric {
                max_deviation: worst.0,
                row: worst.1,
                col: worst.2,
                tolerance: tol,
            });
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let m = 0.5 * (data[i * p + j] + data[j * p + i]);
                data[i * p + j] = m;
                data[j * p + i] = m;
            }
        }
        Ok(Self::dense_unchecked(p, data).with_storage(policy))
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let p = rows.len();
        let mut data = Vec::with_capacity(p * p);
        for r in rows {
            let r = r.as_ref();
            if r.len() != p {
                return Err(Error::invalid("rows must form a square matrix"));
            }
            data.extend_from_slice(r);
        }
        Self::from_dense(p, data)
    }

    /// Builds from `(row, col, value)` triplets. Repeated coordinates are
    /// summed; an entry whose mirror is absent is compared against zero.
    pub fn from_triplets<I>(p: usize, entries: I, tol: Option<f64>, policy: StoragePolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let map = collect_triplets(p, entries)?;
        let max_abs = map.values().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = tol.unwrap_or(DEFAULT_SYMMETRY_TOL * max_abs);
        let mut worst = (0.0f64, 0, 0);
        for (&(i, j), &v) in &map {
            if i < j {
                let mirror = map.get(&(j, i)).copied().unwrap_or(0.0);
                let d = (v - mirror).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            } else if i > j && !map.contains_key(&(j, i)) && v.abs() > worst.0 {
                worst = (v.abs(), j, i);
            }
        }
        if worst.0 > tol {
            return Err(Error::Asymmetric {
                max_deviation: worst.0,
                row: worst.1,
                col: worst.2,
                tolerance: tol,
            });
        }
        Ok(Self::from_symmetric_map(p, average_map(&map), policy))
    }

    /// Returns `(W + W^T) / 2` of a triplet list without any tolerance check.
    pub fn symmetric_part_of_triplets<I>(p: usize, entries: I, policy: StoragePolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let map = collect_triplets(p, entries)?;
        Ok(Self::from_symmetric_map(p, average_map(&map), policy))
    }

    /// Diagonal matrix.
    pub fn diag(d: &[f64]) -> Result<Self> {
        let p = d.len();
        if p == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        let mut data = vec![0.0; p * p];
        for (i, v) in d.iter().enumerate() {
            data[i * p + i] = *v;
        }
        Ok(Self::dense_unchecked(p, data))
    }

    pub fn identity(p: usize) -> Result<Self> {
        Self::diag(&vec![1.0; p])
    }

    /// Builds a dense matrix by evaluating `f(i, j)` for `i <= j`.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(p: usize, mut f: F) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        let mut data = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = f(i, j);
                data[i * p + j] = v;
                data[j * p + i] = v;
            }
        }
        Ok(Self::dense_unchecked(p, data))
    }

    pub(crate) fn dense_unchecked(p: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), p * p);
        SymmetricMatrix {
            dim: p,
            storage: Storage::Dense(data),
        }
    }

    pub(crate) fn from_symmetric_map(p: usize, map: BTreeMap<(usize, usize), f64>, policy: StoragePolicy) -> Self {
        if policy.dense_for(p) {
            let mut data = vec![0.0; p * p];
            for ((i, j), v) in map {
                data[i * p + j] = v;
            }
            Self::dense_unchecked(p, data)
        } else {
            let mut row_ptr = vec![0usize; p + 1];
            let mut col_idx = Vec::with_capacity(map.len());
            let mut values = Vec::with_capacity(map.len());
            for ((i, j), v) in map {
                if v == 0.0 {
                    continue;
                }
                row_ptr[i + 1] += 1;
                col_idx.push(j);
                values.push(v);
            }
            for i in 0..p {
                row_ptr[i + 1] += row_ptr[i];
            }
            SymmetricMatrix {
                dim: p,
                storage: Storage::Sparse(Csr {
                    row_ptr,
                    col_idx,
                    values,
                }),
            }
        }
    }

    /// Converts to the requested storage layout.
    pub fn with_storage(self, policy: StoragePolicy) -> Self {
        let want_dense = policy.dense_for(self.dim);
        match (&self.storage, want_dense) {
            (Storage::Dense(_), true) | (Storage::Sparse(_), false) => self,
            _ => {
                let mut map = BTreeMap::new();
                for i in 0..self.dim {
                    self.for_each_in_row(i, |j, v| {
                        if v != 0.0 {
                            map.insert((i, j), v);
                        }
                    });
                }
                Self::from_symmetric_map(
                    self.dim,
                    map,
                    if want_dense {
                        StoragePolicy::Dense
                    } else {
                        StoragePolicy::Sparse
                    },
                )
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// Stored nonzeros (all `p^2` for dense storage).
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.len(),
            Storage::Sparse(s) => s.values.len(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "entry ({i}, {j}) out of range");
        match &self.storage {
            Storage::Dense(d) => d[i * self.dim + j],
            Storage::Sparse(s) => {
                let (lo, hi) = (s.row_ptr[i], s.row_ptr[i + 1]);
                match s.col_idx[lo..hi].binary_search(&j) {
                    Ok(k) => s.values[lo + k],
                    Err(_) => 0.0,
                }
            }
        }
    }

    /// Calls `f(j, A_ij)` for every stored entry of row `i`, in column order.
    pub fn for_each_in_row<F: FnMut(usize, f64)>(&self, i: usize, mut f: F) {
        match &self.storage {
            Storage::Dense(d) => {
                let row = &d[i * self.dim..(i + 1) * self.dim];
                for (j, v) in row.iter().enumerate() {
                    f(j, *v);
                }
            }
            Storage::Sparse(s) => {
                for k in s.row_ptr[i]..s.row_ptr[i + 1] {
                    f(s.col_idx[k], s.values[k]);
                }
            }
        }
    }

    /// Row-major copy of all entries.
    pub fn to_dense_vec(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(_) => {
                let p = self.dim;
                let mut out = vec![0.0; p * p];
                for i in 0..p {
                    self.for_each_in_row(i, |j, v| out[i * p + j] = v);
                }
                out
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entry(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            self.for_each_in_row(i, |_, v| m = m.max(v.abs()));
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            self.for_each_in_row(i, |_, v| s += v * v);
        }
        s.sqrt()
    }

    /// `out = A x` without dimension checks; accumulation is row by row in
    /// column order.
    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.storage {
            Storage::Dense(d) => {
                for (o, row) in out.iter_mut().zip(d.chunks_exact(self.dim)) {
                    *o = dot(row, x);
                }
            }
            Storage::Sparse(s) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for k in s.row_ptr[i]..s.row_ptr[i + 1] {
                        acc += s.values[k] * x[s.col_idx[k]];
                    }
                    *o = acc;
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut out = vec![0.0; self.dim];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// `x^T A x` (x need not be unit).
    pub fn rayleigh_quotient(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(x, &self.matvec(x)?))
    }

    /// `A_F`, keeping the order of `F`.
    pub fn principal_submatrix(&self, f: &IndexSet) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::invalid("principal submatrix of an empty index set"));
        }
        f.check_bound(self.dim)?;
        let idx = f.as_slice();
        let m = idx.len();
        if StoragePolicy::Auto.dense_for(m) {
            let mut data = vec![0.0; m * m];
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate().skip(a) {
                    let v = self.entry(i, j);
                    data[a * m + b] = v;
                    data[b * m + a] = v;
                }
            }
            Ok(Self::dense_unchecked(m, data))
        } else {
            let mut pos = vec![usize::MAX; self.dim];
            for (a, &i) in idx.iter().enumerate() {
                pos[i] = a;
            }
            let mut map = BTreeMap::new();
            for (a, &i) in idx.iter().enumerate() {
                self.for_each_in_row(i, |j, v| {
                    if pos[j] != usize::MAX && v != 0.0 {
                        map.insert((a, pos[j]), v);
                    }
                });
            }
            Ok(Self::from_symmetric_map(m, map, StoragePolicy::Sparse))
        }
    }

    /// `max(0, max_i (sum_{j != i} |A_ij| - A_ii))`: by Gershgorin, `A + sI`
    /// is positive semidefinite.
    pub fn gershgorin_shift_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let mut radius = 0.0;
                let mut diag = 0.0;
                self.for_each_in_row(i, |j, v| {
                    if j == i {
                        diag = v;
                    } else {
                        radius += v.abs();
                    }
                });
                radius - diag
            })
            .fold(0.0, f64::max)
    }

    /// `max_i sum_j |A_ij|`, an upper bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let mut s = 0.0;
                self.for_each_in_row(i, |_, v| s += v.abs());
                s
            })
            .fold(0.0, f64::max)
    }

    /// `max_i (A_ii + sum_{j != i} |A_ij|) >= lambda_max(A)`.
    pub fn gershgorin_upper_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let mut s = 0.0;
                self.for_each_in_row(i, |j, v| s += if j == i { v } else { v.abs() });
                s
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `alpha * A + beta * I`, same storage kind.
    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        let p = self.dim;
        match &self.storage {
            Storage::Dense(d) => {
                let mut data: Vec<f64> = d.iter().map(|v| alpha * v).collect();
                for i in 0..p {
                    data[i * p + i] += beta;
                }
                Self::dense_unchecked(p, data)
            }
            Storage::Sparse(_) => {
                let mut map = BTreeMap::new();
                for i in 0..p {
                    self.for_each_in_row(i, |j, v| {
                        map.insert((i, j), alpha * v);
                    });
                    *map.entry((i, i)).or_insert(0.0) += beta;
                }
                Self::from_symmetric_map(p, map, StoragePolicy::Sparse)
            }
        }
    }

    /// Entrywise sum of two matrices of equal dimension.
    pub fn add(&self, other: &SymmetricMatrix) -> Result<Self> {
        other.check_len(self.dim)?;
        let a = self.to_dense_vec();
        let b = other.to_dense_vec();
        let data = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Ok(Self::dense_unchecked(self.dim, data).with_storage(
            if self.is_dense() || other.is_dense() {
                StoragePolicy::Auto
            } else {
                StoragePolicy::Sparse
            },
        ))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: matrix is {p}x{p}, vector has length {n}",
                p = self.dim
            )));
        }
        Ok(())
    }
}

fn collect_triplets<I>(p: usize, entries: I) -> Result<BTreeMap<(usize, usize), f64>>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    if p == 0 {
        return Err(Error::invalid("matrix dimension must be at least 1"));
    }
    let mut map = BTreeMap::new();
    for (i, j, v) in entries {
        if i >= p || j >= p {
            return Err(Error::invalid(format!(
                "entry ({i}, {j}) out of range for dimension {p}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
        }
        *map.entry((i, j)).or_insert(0.0) += v;
    }
    Ok(map)
}

fn average_map(map: &BTreeMap<(usize, usize), f64>) -> BTreeMap<(usize, usize), f64> {
    let mut out = BTreeMap::new();
    for (&(i, j), &v) in map {
        if i == j {
            out.insert((i, i), v);
        } else if i < j || !map.contains_key(&(j, i)) {
            let mirror = map.get(&(j, i)).copied().unwrap_or(0.0);
            let m = 0.5 * (v + mirror);
            out.insert((i, j), m);
            out.insert((j, i), m);
        }
    }
    out
}
