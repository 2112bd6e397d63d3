//! Exhaustive enumeration oracles for the sparse eigenvalue and densest
//! k-subgraph problems.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, IndexSet, SymmetricMatrix};

pub const DEFAULT_ORACLE_BUDGET: u128 = 1_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn check_budget(n: usize, k: usize, budget: u128, hint: &'static str) -> Result<()> {
    let required = binomial(n, k);
    if required > budget {
        return Err(Error::BudgetExceeded {
            required,
            budget,
            hint,
        });
    }
    Ok(())
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cardinality k = {k} outside [1, {n}]")));
    }
    Ok(())
}

/// `lambda_max(A, k)` by enumerating every k-subset; ties keep the
/// lexicographically first subset.
pub fn brute_force_sparse_eig(a: &SymmetricMatrix, k: usize) -> Result<(f64, IndexSet)> {
    brute_force_sparse_eig_with_budget(a, k, DEFAULT_ORACLE_BUDGET)
}

pub fn brute_force_sparse_eig_with_budget(
    a: &SymmetricMatrix,
    k: usize,
    budget: u128,
) -> Result<(f64, IndexSet)> {
    let p = a.dim();
    check_k(p, k)?;
    check_budget(p, k, budget, "")?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..p).combinations(k) {
        let sub = a.principal_submatrix(&IndexSet::new(subset.clone()))?;
        let lambda = symmetric_eigen(&sub).values[0];
        if best.as_ref().map_or(true, |(b, _)| lambda > *b) {
            best = Some((lambda, subset));
        }
    }
    let (v, s) = best.expect("at least one subset");
    Ok((v, IndexSet::new(s)))
}

/// Smallest k-sparse eigenvalue by enumeration.
pub fn brute_force_smallest_sparse_eig(a: &SymmetricMatrix, k: usize) -> Result<(f64, IndexSet)> {
    let p = a.dim();
    check_k(p, k)?;
    check_budget(p, k, DEFAULT_ORACLE_BUDGET, "")?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..p).combinations(k) {
        let sub = a.principal_submatrix(&IndexSet::new(subset.clone()))?;
        let lambda = *symmetric_eigen(&sub).values.last().unwrap();
        if best.as_ref().map_or(true, |(b, _)| lambda < *b) {
            best = Some((lambda, subset));
        }
    }
    let (v, s) = best.expect("at least one subset");
    Ok((v, IndexSet::new(s)))
}

/// `max pi^T W pi / k` over 0/1 vectors with `k` ones, by enumeration.
pub fn brute_force_dks(w: &SymmetricMatrix, k: usize) -> Result<(f64, IndexSet)> {
    brute_force_dks_with_budget(w, k, DEFAULT_ORACLE_BUDGET)
}

pub fn brute_force_dks_with_budget(w: &SymmetricMatrix, k: usize, budget: u128) -> Result<(f64, IndexSet)> {
    let n = w.dim();
    check_k(n, k)?;
    check_budget(n, k, budget, "")?;
    let dense = w.to_dense_vec();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..n).combinations(k) {
        let mut total = 0.0;
        for &i in &subset {
            for &j in &subset {
                total += dense[i * n + j];
            }
        }
        let d = total / k as f64;
        if best.as_ref().map_or(true, |(b, _)| d > *b) {
            best = Some((d, subset));
        }
    }
    let (v, s) = best.expect("at least one subset");
    Ok((v, IndexSet::new(s)))
}
