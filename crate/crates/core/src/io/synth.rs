//! Synthetic instances with known ground truth.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dks::WeightedGraph;
use crate::error::{Error, Result};
use crate::linalg::{dot, normalize, IndexSet, SparseUnitVector};
use crate::rng::{gaussian_vec, stream};
use crate::spca::DataMatrix;

const GRAM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub true_loadings: Vec<SparseUnitVector>,
    pub planted_vertices: Option<IndexSet>,
    pub eigenvalue_spec: Vec<f64>,
}

/// The toy model: `v1` uniform on coordinates 0..10, `v2` uniform on
/// 10..20, spectrum `(400, 300, 1, ..., 1)`.
pub fn default_spiked_spec(p: usize) -> Result<(Vec<SparseUnitVector>, Vec<f64>)> {
    if p < 20 {
        return Err(Error::invalid(format!("the default spiked model needs p >= 20, got {p}")));
    }
    let v1 = SparseUnitVector::indicator(p, IndexSet::new((0..10).collect()))?;
    let v2 = SparseUnitVector::indicator(p, IndexSet::new((10..20).collect()))?;
    let mut eig = vec![1.0; p];
    eig[0] = 400.0;
    eig[1] = 300.0;
    Ok((vec![v1, v2], eig))
}

fn check_spec(p: usize, loadings: &[SparseUnitVector], eigenvalues: &[f64]) -> Result<()> {
    if p == 0 || loadings.len() > p {
        return Err(Error::invalid(format!("{} loadings in dimension {p}", loadings.len())));
    }
    if eigenvalues.len() != p {
        return Err(Error::invalid(format!("need {p} eigenvalues, got {}", eigenvalues.len())));
    }
    if eigenvalues.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::invalid("eigenvalues must be positive and finite"));
    }
    if eigenvalues.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::invalid("eigenvalues must be in descending order"));
    }
    for (i, u) in loadings.iter().enumerate() {
        if u.dim() != p {
            return Err(Error::invalid(format!("loading {i} has dimension {}, expected {p}", u.dim())));
        }
        for (j, v) in loadings.iter().enumerate().take(i + 1) {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (dot(u.values(), v.values()) - target).abs();
            if dev > GRAM_TOL {
                return Err(Error::invalid(format!(
                    "loadings are not orthonormal: Gram entry ({i}, {j}) deviates by {dev:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Extends `basis` to `p` orthonormal vectors with random directions.
fn complete_basis(p: usize, mut basis: Vec<Vec<f64>>, seed: u64, trial: u64) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, trial, "spiked-completion");
    while basis.len() < p {
        let mut v = gaussian_vec(&mut rng, p);
        // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        if normalize(&mut v) > 1e-8 {
            basis.push(v);
        }
    }
    basis
}

/// `n` samples from `N(0, V D V^T)` where the leading columns of `V` are
/// `loadings` and the rest is a seeded random orthonormal completion.
/// When every eigenvalue past the loadings is the same `c` the completion
/// is skipped, using `Sigma^{1/2} = sqrt(c) I + sum (sqrt(l_i) - sqrt(c)) v_i v_i^T`.
pub fn gen_spiked_covariance(
    p: usize,
    n: usize,
    loadings: &[SparseUnitVector],
    eigenvalues: &[f64],
    seed: u64,
    trial: u64,
) -> Result<(DataMatrix, GroundTruth)> {
    check_spec(p, loadings, eigenvalues)?;
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let m = loadings.len();
    let tail = &eigenvalues[m..];
    let constant_tail = tail.windows(2).all(|w| w[0] == w[1]);
    let mut rng = stream(seed, trial, "spiked-samples");
    let mut values = Vec::with_capacity(n * p);
    if constant_tail {
        let c = tail.first().copied().unwrap_or(0.0);
        let sc = c.sqrt();
        for _ in 0..n {
            let z = gaussian_vec(&mut rng, p);
            let mut x: Vec<f64> = z.iter().map(|v| sc * v).collect();
            for (u, l) in loadings.iter().zip(eigenvalues) {
                let coef = (l.sqrt() - sc) * dot(u.values(), &z);
                for i in u.support().iter() {
                    x[i] += coef * u.values()[i];
                }
            }
            values.extend(x);
        }
    } else {
        let basis = complete_basis(p, loadings.iter().map(|u| u.values().to_vec()).collect(), seed, trial);
        let roots: Vec<f64> = eigenvalues.iter().map(|l| l.sqrt()).collect();
        for _ in 0..n {
            let z = gaussian_vec(&mut rng, p);
            let mut x = vec![0.0; p];
            for (b, r) in basis.iter().zip(&roots) {
                let coef = r * dot(b, &z);
                x.iter_mut().zip(b).for_each(|(a, v)| *a += coef * v);
            }
            values.extend(x);
        }
    }
    let truth = GroundTruth {
        true_loadings: loadings.to_vec(),
        planted_vertices: None,
        eigenvalue_spec: eigenvalues.to_vec(),
    };
    Ok((DataMatrix::new(n, p, values)?, truth))
}

/// `n x p` matrix of independent standard normal entries.
pub fn gen_gaussian_data(n: usize, p: usize, seed: u64, trial: u64) -> Result<DataMatrix> {
    let mut rng = stream(seed, trial, "gaussian-data");
    DataMatrix::new(n, p, gaussian_vec(&mut rng, n * p))
}

/// Random graph with a planted `k`-set: each pair inside it is an edge with
/// probability `p_in`, every other pair with probability `p_out`.
pub fn gen_planted_subgraph(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
    trial: u64,
) -> Result<(WeightedGraph, GroundTruth)> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("planted size k = {k} outside [1, {n}]")));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out > p_in {
        return Err(Error::invalid(format!("need 0 <= p_out <= p_in <= 1, got p_in = {p_in}, p_out = {p_out}")));
    }
    let mut rng = stream(seed, trial, "planted-set");
    let planted = IndexSet::new(rand::seq::index::sample(&mut rng, n, k).into_vec());
    let mut inside = vec![false; n];
    planted.iter().for_each(|i| inside[i] = true);
    let mut rng = stream(seed, trial, "planted-edges");
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if inside[i] && inside[j] { p_in } else { p_out };
            if rng.gen::<f64>() < prob {
                edges.push((i, j, 1.0));
            }
        }
    }
    let truth = GroundTruth {
        true_loadings: Vec::new(),
        planted_vertices: Some(planted),
        eigenvalue_spec: Vec::new(),
    };
    Ok((WeightedGraph::new(n, edges, false)?, truth))
}
