//! Dense vector helpers, index sets and k-sparse unit vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted set of distinct 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds a set from arbitrary indices, sorting and removing duplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet(indices)
    }

    pub fn full(p: usize) -> Self {
        IndexSet((0..p).collect())
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Largest index plus one, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        self.0.last().map_or(0, |&i| i + 1)
    }

    pub(crate) fn check_bound(&self, p: usize) -> Result<()> {
        if self.bound() > p {
            return Err(Error::invalid(format!(
                "index {} out of range for dimension {p}",
                self.bound() - 1
            )));
        }
        Ok(())
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(v: Vec<usize>) -> Self {
        IndexSet::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(v: [usize; N]) -> Self {
        IndexSet::new(v.to_vec())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Scales `x` to unit length in place and returns the original norm.
/// A zero vector is left untouched.
pub fn normalize(x: &mut [f64]) -> f64 {
    let n = norm2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Zeroes every entry of `x` outside `support`.
pub fn truncate(x: &[f64], support: &IndexSet) -> Result<Vec<f64>> {
    support.check_bound(x.len())?;
    let mut out = vec![0.0; x.len()];
    for i in support.iter() {
        out[i] = x[i];
    }
    Ok(out)
}

/// Indices of the `k` largest entries ranked by `key`, ties broken by the
/// smaller index.
fn top_k_by<F: Fn(f64) -> f64>(x: &[f64], k: usize, key: F) -> Result<IndexSet> {
    if k == 0 || k > x.len() {
        return Err(Error::invalid(format!(
            "k = {k} outside [1, {}]",
            x.len()
        )));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    let cmp = |&a: &usize, &b: &usize| {
        key(x[b])
            .partial_cmp(&key(x[a]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    };
    if k < x.len() {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    Ok(IndexSet::new(order))
}

/// Indices of the `k` entries of largest magnitude (lowest index wins ties).
pub fn top_k_support(x: &[f64], k: usize) -> Result<IndexSet> {
    top_k_by(x, k, f64::abs)
}

/// Indices of the `k` largest signed entries (lowest index wins ties).
pub fn top_k_values(x: &[f64], k: usize) -> Result<IndexSet> {
    top_k_by(x, k, |v| v)
}

/// Unit-norm vector with an explicit support set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseUnitVector {
    values: Vec<f64>,
    support: IndexSet,
}

pub(crate) const UNIT_TOL: f64 = 1e-9;

impl SparseUnitVector {
    /// Truncates `x` to `support` and normalizes.
    pub fn from_truncated(x: &[f64], support: IndexSet) -> Result<Self> {
        let mut values = truncate(x, &support)?;
        if normalize(&mut values) == 0.0 {
            return Err(Error::DegenerateInput(
                "vector vanishes on the requested support".into(),
            ));
        }
        Ok(SparseUnitVector { values, support })
    }

    /// Normalizes `x` and takes its nonzero pattern as the support.
    pub fn from_dense(x: &[f64]) -> Result<Self> {
        let support = IndexSet::new(
            x.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        );
        Self::from_truncated(x, support)
    }

    pub fn basis(p: usize, i: usize) -> Result<Self> {
        let mut x = vec![0.0; p];
        *x.get_mut(i)
            .ok_or_else(|| Error::invalid(format!("index {i} out of range for dimension {p}")))? = 1.0;
        Ok(SparseUnitVector {
            values: x,
            support: IndexSet::singleton(i),
        })
    }

    /// Normalized indicator of `support`.
    pub fn indicator(p: usize, support: IndexSet) -> Result<Self> {
        support.check_bound(p)?;
        if support.is_empty() {
            return Err(Error::invalid("indicator of an empty set"));
        }
        let v = 1.0 / (support.len() as f64).sqrt();
        let mut values = vec![0.0; p];
        for i in support.iter() {
            values[i] = v;
        }
        Ok(SparseUnitVector { values, support })
    }

    pub(crate) fn from_parts_unchecked(values: Vec<f64>, support: IndexSet) -> Self {
        debug_assert!((norm2(&values) - 1.0).abs() <= UNIT_TOL);
        debug_assert!(values
            .iter()
            .enumerate()
            .all(|(i, v)| *v == 0.0 || support.contains(i)));
        SparseUnitVector { values, support }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of entries that are actually nonzero.
    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    /// Truncates to the top-`k` magnitudes and renormalizes; a vector with
    /// at most `k` nonzeros is returned unchanged.
    pub fn truncated_to(&self, k: usize) -> Result<Self> {
        if self.nnz() <= k {
            return Ok(self.clone());
        }
        let support = top_k_support(&self.values, k.min(self.dim()))?;
        Self::from_truncated(&self.values, support)
    }

    /// Absolute inner product with a dense vector.
    pub fn overlap(&self, other: &[f64]) -> f64 {
        dot(&self.values, other).abs()
    }
}
