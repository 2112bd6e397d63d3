//! Sparse PCA: covariance construction, multi-component extraction with
//! projection deflation, adjusted variance and a greedy forward baseline.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, leading_eigenpair, IndexSet, SparseUnitVector, StoragePolicy, SymmetricMatrix};
use crate::solver::{restricted_leading_vector, tpower, SolveConfig, SparseEigenResult, TraceEntry};

/// Row-major `n x p` data matrix, one sample per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    centered: bool,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("data matrix must have at least one row and one column"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} values for a {rows} x {cols} matrix",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                i / cols,
                i % cols
            )));
        }
        Ok(DataMatrix {
            rows,
            cols,
            values,
            centered: false,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for row in self.values.chunks_exact(self.cols) {
            m.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        m.iter_mut().for_each(|v| *v /= self.rows as f64);
        m
    }

    /// Subtracts column means in place.
    pub fn center(&mut self) {
        let m = self.column_means();
        for row in self.values.chunks_exact_mut(self.cols) {
            row.iter_mut().zip(&m).for_each(|(a, b)| *a -= b);
        }
        self.centered = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceScaling {
    /// `D^T D`.
    #[default]
    Unscaled,
    /// `D^T D / n`, the empirical covariance of the spiked model.
    PerSample,
}

/// `D^T D` (or `D^T D / n`), after optional column centering.
pub fn covariance_from_data(d: &DataMatrix, center: bool, scaling: CovarianceScaling) -> Result<SymmetricMatrix> {
    let (n, p) = (d.rows, d.cols);
    let mut owned;
    let d = if center && !d.centered {
        owned = d.clone();
        owned.center();
        &owned
    } else {
        d
    };
    // Column-major copy so each entry is a contiguous dot product.
    let mut cols = vec![0.0; n * p];
    for (i, row) in d.values.chunks_exact(p).enumerate() {
        for (j, v) in row.iter().enumerate() {
            cols[j * n + i] = *v;
        }
    }
    let scale = match scaling {
        CovarianceScaling::Unscaled => 1.0,
        CovarianceScaling::PerSample => 1.0 / n as f64,
    };
    let upper: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let ci = &cols[i * n..(i + 1) * n];
            (i..p).map(|j| scale * dot(ci, &cols[j * n..(j + 1) * n])).collect()
        })
        .collect();
    let mut data = vec![0.0; p * p];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            data[i * p + i + off] = v;
            data[(i + off) * p + i] = v;
        }
    }
    Ok(SymmetricMatrix::dense_unchecked(p, data))
}

/// `(I - x x^T) S (I - x x^T)`, expanded as
/// `S - x (Sx)^T - (Sx) x^T + (x^T S x) x x^T`.
pub fn projection_deflate(sigma: &SymmetricMatrix, x: &SparseUnitVector) -> Result<SymmetricMatrix> {
    let p = sigma.dim();
    if x.dim() != p {
        return Err(Error::invalid(format!("loading has dimension {}, matrix {p}", x.dim())));
    }
    let xv = x.values();
    let sx = sigma.matvec(xv)?;
    let q = dot(xv, &sx);
    if sigma.is_dense() {
        let mut data = sigma.to_dense_vec();
        for i in 0..p {
            for j in 0..p {
                data[i * p + j] += -xv[i] * sx[j] - sx[i] * xv[j] + q * xv[i] * xv[j];
            }
        }
        // Restore exact symmetry lost to rounding order.
        for i in 0..p {
            for j in (i + 1)..p {
                let v = 0.5 * (data[i * p + j] + data[j * p + i]);
                data[i * p + j] = v;
                data[j * p + i] = v;
            }
        }
        return Ok(SymmetricMatrix::dense_unchecked(p, data));
    }
    let mut map = BTreeMap::new();
    for i in 0..p {
        sigma.for_each_in_row(i, |j, v| {
            map.insert((i, j), v);
        });
    }
    let touched: Vec<usize> = (0..p).filter(|&i| xv[i] != 0.0 || sx[i] != 0.0).collect();
    for &i in &touched {
        for &j in &touched {
            let u = -xv[i] * sx[j] - sx[i] * xv[j] + q * xv[i] * xv[j];
            if u != 0.0 {
                *map.entry((i, j)).or_insert(0.0) += u;
            }
        }
    }
    let sym: BTreeMap<(usize, usize), f64> = map
        .iter()
        .map(|(&(i, j), &v)| ((i, j), 0.5 * (v + map.get(&(j, i)).copied().unwrap_or(0.0))))
        .collect();
    Ok(SymmetricMatrix::from_symmetric_map(p, sym, StoragePolicy::Sparse))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpcaResult {
    pub loadings: Vec<SparseUnitVector>,
    pub cardinalities: Vec<usize>,
    /// `x_j^T S x_j` on the input matrix.
    pub explained_variance: Vec<f64>,
    /// `sum_j x_j^T S x_j / trace(S)`, the figure reported for Pitprops.
    pub proportion_explained: f64,
    /// Zou's adjusted variance per component; `None` when the loadings are
    /// linearly dependent.
    pub adjusted_variance: Option<Vec<f64>>,
    pub proportion_adjusted: Option<f64>,
    pub per_component_results: Vec<SparseEigenResult>,
}

/// Extracts one component per entry of `cardinalities`, deflating by
/// projection after each.
pub fn spca_extract(sigma: &SymmetricMatrix, cardinalities: &[usize], config: &SolveConfig) -> Result<SpcaResult> {
    let p = sigma.dim();
    if cardinalities.is_empty() {
        return Err(Error::invalid("at least one cardinality is required"));
    }
    if let Some(k) = cardinalities.iter().find(|&&k| k == 0 || k > p) {
        return Err(Error::invalid(format!("cardinality {k} outside [1, {p}]")));
    }
    let mut current = sigma.clone();
    let mut results = Vec::with_capacity(cardinalities.len());
    for (index, &k) in cardinalities.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.k = k;
        let r = tpower(&current, &cfg).map_err(|e| Error::Component {
            index,
            source: Box::new(e),
        })?;
        if index + 1 < cardinalities.len() {
            current = projection_deflate(&current, &r.x)?;
        }
        results.push(r);
    }
    let loadings: Vec<SparseUnitVector> = results.iter().map(|r| r.x.clone()).collect();
    let explained_variance: Vec<f64> = loadings
        .iter()
        .map(|x| sigma.rayleigh_quotient(x.values()))
        .collect::<Result<_>>()?;
    let trace = sigma.trace();
    let proportion_explained = if trace > 0.0 {
        explained_variance.iter().sum::<f64>() / trace
    } else {
        0.0
    };
    let (adjusted_variance, proportion_adjusted) = match adjusted_variance(sigma, &loadings) {
        Ok((per, prop)) => (Some(per), Some(prop)),
        Err(Error::DegenerateLoadings { determinant }) => {
            log::warn!("loadings are linearly dependent (Gram determinant {determinant:e}); no adjusted variance");
            (None, None)
        }
        Err(e) => return Err(e),
    };
    Ok(SpcaResult {
        loadings,
        cardinalities: cardinalities.to_vec(),
        explained_variance,
        proportion_explained,
        adjusted_variance,
        proportion_adjusted,
        per_component_results: results,
    })
}

/// [`spca_extract`] on the covariance of a data matrix.
pub fn spca_extract_data(
    d: &DataMatrix,
    center: bool,
    scaling: CovarianceScaling,
    cardinalities: &[usize],
    config: &SolveConfig,
) -> Result<SpcaResult> {
    spca_extract(&covariance_from_data(d, center, scaling)?, cardinalities, config)
}

/// Minimum determinant of `U^T U` accepted as linearly independent.
pub const GRAM_DET_MIN: f64 = 1e-12;

/// Adjusted variance of possibly non-orthogonal loadings: with
/// `G = U^T S U = R^T R` (Cholesky, in loading order) component `j`
/// explains `R_jj^2`. Returns the per-component values and their sum over
/// `trace(S)`.
pub fn adjusted_variance(sigma: &SymmetricMatrix, loadings: &[SparseUnitVector]) -> Result<(Vec<f64>, f64)> {
    let p = sigma.dim();
    let m = loadings.len();
    if m == 0 {
        return Err(Error::invalid("no loadings"));
    }
    if let Some(x) = loadings.iter().find(|x| x.dim() != p) {
        return Err(Error::invalid(format!("loading has dimension {}, matrix {p}", x.dim())));
    }
    let mut overlap = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            overlap[a * m + b] = dot(loadings[a].values(), loadings[b].values());
        }
    }
    let det = determinant(overlap, m);
    if !(det > GRAM_DET_MIN) {
        return Err(Error::DegenerateLoadings { determinant: det });
    }
    let su: Vec<Vec<f64>> = loadings
        .iter()
        .map(|x| sigma.matvec(x.values()))
        .collect::<Result<_>>()?;
    let mut g = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            g[a * m + b] = dot(loadings[a].values(), &su[b]);
        }
    }
    let r = cholesky_upper(&g, m);
    let per: Vec<f64> = (0..m).map(|j| r[j * m + j] * r[j * m + j]).collect();
    let trace = sigma.trace();
    let proportion = if trace > 0.0 { per.iter().sum::<f64>() / trace } else { 0.0 };
    Ok((per, proportion))
}

/// Upper-triangular `R` with `R^T R = G` for symmetric PSD `G`. A zero
/// pivot (semidefinite `G`) zeroes the rest of its row.
fn cholesky_upper(g: &[f64], m: usize) -> Vec<f64> {
    let mut r = vec![0.0f64; m * m];
    for j in 0..m {
        let d = g[j * m + j] - (0..j).map(|i| r[i * m + j].powi(2)).sum::<f64>();
        let rjj = d.max(0.0).sqrt();
        r[j * m + j] = rjj;
        if rjj > 0.0 {
            for l in (j + 1)..m {
                let s = g[j * m + l] - (0..j).map(|i| r[i * m + j] * r[i * m + l]).sum::<f64>();
                r[j * m + l] = s / rjj;
            }
        }
    }
    r
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| a[x * n + c].abs().partial_cmp(&a[y * n + c].abs()).unwrap())
            .unwrap();
        if a[piv * n + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                a.swap(c * n + k, piv * n + k);
            }
            det = -det;
        }
        let d = a[c * n + c];
        det *= d;
        for r in (c + 1)..n {
            let f = a[r * n + c] / d;
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
        }
    }
    det
}

/// Greedy forward selection: start from the empty set and add, `k` times,
/// the variable that maximizes the leading eigenvalue of the enlarged
/// principal submatrix. Ties go to the lowest index.
pub fn greedy_forward_spca(sigma: &SymmetricMatrix, k: usize) -> Result<SparseEigenResult> {
    let p = sigma.dim();
    if k == 0 || k > p {
        return Err(Error::invalid(format!("cardinality k = {k} outside [1, {p}]")));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    for _ in 0..k {
        let candidates: Vec<usize> = (0..p).filter(|i| !chosen.contains(i)).collect();
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|&c| {
                let mut f = chosen.clone();
                f.push(c);
                let sub = sigma.principal_submatrix(&IndexSet::new(f))?;
                Ok(leading_eigenpair(&sub)?.0)
            })
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        chosen.push(candidates[best]);
        trace.push(TraceEntry {
            objective: scores[best],
            support: IndexSet::new(chosen.clone()),
        });
    }
    let x = restricted_leading_vector(sigma, IndexSet::new(chosen))?;
    let objective = sigma.rayleigh_quotient(x.values())?;
    Ok(SparseEigenResult {
        x,
        objective,
        iterations: k,
        converged: true,
        shift_used: 0.0,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    Tpower,
    GreedyForward,
}

/// One extraction per `k`; returns `(k, x^T S x)` sorted by `k`.
pub fn variance_cardinality_sweep(
    sigma: &SymmetricMatrix,
    k_values: &[usize],
    method: SweepMethod,
    config: &SolveConfig,
) -> Result<Vec<(usize, f64)>> {
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.par_iter()
        .map(|&k| {
            let r = match method {
                SweepMethod::Tpower => {
                    let mut cfg = config.clone();
                    cfg.k = k;
                    tpower(sigma, &cfg)?
                }
                SweepMethod::GreedyForward => greedy_forward_spca(sigma, k)?,
            };
            Ok((k, r.objective))
        })
        .collect()
}
