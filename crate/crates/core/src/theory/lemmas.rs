//! Checkers for the individual inequalities behind the recovery bound. Each
//! returns the worst slack (`rhs - lhs`, negative when violated) so callers
//! can see how close an instance came.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, symmetric_eigen, top_k_support, truncate, IndexSet, SymmetricMatrix};
use crate::theory::{delta, gamma, restricted_spectral_norm, NormMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass { slack: f64 },
    Fail { slack: f64, detail: String },
    Skipped { reason: String },
}

impl Verdict {
    fn from_slack(slack: f64, tol: f64, detail: impl FnOnce() -> String) -> Self {
        if slack >= -tol {
            Verdict::Pass { slack }
        } else {
            Verdict::Fail {
                slack,
                detail: detail(),
            }
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn slack(&self) -> Option<f64> {
        match self {
            Verdict::Pass { slack } | Verdict::Fail { slack, .. } => Some(*slack),
            Verdict::Skipped { .. } => None,
        }
    }
}

const UNIT_TOL: f64 = 1e-9;

fn check_unit(x: &[f64], name: &str) -> Result<()> {
    let n = norm2(x);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("{name} must be a unit vector (norm {n})")));
    }
    Ok(())
}

/// Weyl's inequalities for `B + U`: with eigenvalues in descending order,
/// `lambda_{i+j-1}(B+U) <= lambda_i(B) + lambda_j(U)` and
/// `lambda_{i+j-p}(B+U) >= lambda_i(B) + lambda_j(U)`, for all valid `i, j`.
pub fn check_weyl(b: &SymmetricMatrix, u: &SymmetricMatrix, tol: f64) -> Result<Verdict> {
    let p = b.dim();
    if u.dim() != p {
        return Err(Error::invalid(format!("dimension mismatch: {p} vs {}", u.dim())));
    }
    let lb = symmetric_eigen(b).values;
    let lu = symmetric_eigen(u).values;
    let ls = symmetric_eigen(&b.add(u)?).values;
    let mut worst = f64::INFINITY;
    let mut at = (0, 0);
    for i in 0..p {
        for j in 0..p {
            let sum = lb[i] + lu[j];
            if i + j < p {
                let m = sum - ls[i + j];
                if m < worst {
                    worst = m;
                    at = (i, j);
                }
            }
            if i + j >= p - 1 {
                let m = ls[i + j + 1 - p] - sum;
                if m < worst {
                    worst = m;
                    at = (i, j);
                }
            }
        }
    }
    Ok(Verdict::from_slack(worst, tol, || {
        format!("Weyl inequality fails at (i, j) = ({}, {})", at.0 + 1, at.1 + 1)
    }))
}

/// Restricted perturbation: for `F` containing the support of the leading
/// eigenvector `x_bar` of `a_bar`, with `rho = rho(E, |F|) <= gap / 2`,
/// the eigenvalue ratio of `(a_bar + E)_F` is at most `gamma(|F|)` and
/// `||x_bar - x(F)|| <= delta(|F|)`.
pub fn check_perturbation_lemma(
    a_bar: &SymmetricMatrix,
    e: &SymmetricMatrix,
    f: &IndexSet,
    tol: f64,
) -> Result<Verdict> {
    let p = a_bar.dim();
    if e.dim() != p {
        return Err(Error::invalid(format!("dimension mismatch: {p} vs {}", e.dim())));
    }
    if f.is_empty() {
        return Err(Error::invalid("empty index set"));
    }
    f.check_bound(p)?;
    let eig = symmetric_eigen(a_bar);
    let lambda = eig.values[0];
    let rest = eig.values[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = lambda - rest;
    if !(lambda > 0.0) || !(gap > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "leading eigenvalue {lambda:.4e} is not strictly dominant (gap {gap:.4e})"
        )));
    }
    let x_bar = &eig.vectors[0];
    if let Some(i) = (0..p).find(|&i| !f.contains(i) && x_bar[i].abs() > 1e-10) {
        return Err(Error::PreconditionViolation(format!(
            "x_bar has mass {:.3e} at index {i} outside F",
            x_bar[i]
        )));
    }
    let rho = restricted_spectral_norm(e, f.len(), NormMode::Exact)?.value;
    if rho > gap / 2.0 {
        return Err(Error::PreconditionViolation(format!(
            "rho = {rho:.4e} exceeds gap / 2 = {:.4e}",
            gap / 2.0
        )));
    }
    let sub = a_bar.add(e)?.principal_submatrix(f)?;
    let se = symmetric_eigen(&sub);
    let top = se.values[0];
    let second = se.values[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ratio = second / top;
    let g = gamma(lambda, gap, rho);
    let mut xf = vec![0.0; p];
    for (i, v) in f.iter().zip(&se.vectors[0]) {
        xf[i] = *v;
    }
    let sign = if dot(&xf, x_bar) < 0.0 { -1.0 } else { 1.0 };
    let dist = x_bar
        .iter()
        .zip(&xf)
        .map(|(a, b)| (a - sign * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let d = delta(gap, rho);
    let slack = (g - ratio).min(d - dist);
    Ok(Verdict::from_slack(slack, tol, || {
        format!("ratio {ratio:.6} vs gamma {g:.6}; distance {dist:.6} vs delta {d:.6}")
    }))
}

/// One power step on `A_F` moves a unit `x` toward the dominant eigenvector
/// `y`: `|y^T x'| >= |y^T x| [1 + (1 - gamma^2)(1 - (y^T x)^2) / 2]` with
/// `x' = A_F x / ||A_F x||` and `gamma` the ratio of the second largest to
/// the largest eigenvalue magnitude.
pub fn check_power_progress(a_f: &SymmetricMatrix, x: &[f64], tol: f64) -> Result<Verdict> {
    let n = a_f.dim();
    if x.len() != n {
        return Err(Error::invalid(format!("vector length {} vs dimension {n}", x.len())));
    }
    check_unit(x, "x")?;
    let eig = symmetric_eigen(a_f);
    let mut mags: Vec<(f64, usize)> = eig.values.iter().map(|v| v.abs()).zip(0..).collect();
    mags.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let top = mags[0].0;
    if top == 0.0 {
        return Err(Error::DegenerateInput("A_F is zero".into()));
    }
    let second = mags.get(1).map_or(0.0, |m| m.0);
    if second >= top {
        return Ok(Verdict::Skipped {
            reason: "no strictly dominant eigenvalue".into(),
        });
    }
    let g = second / top;
    let y = &eig.vectors[mags[0].1];
    let c = dot(y, x).abs();
    if c < 1e-14 {
        return Ok(Verdict::Skipped {
            reason: "x is orthogonal to the dominant eigenvector".into(),
        });
    }
    let mut next = a_f.matvec(x)?;
    let nn = norm2(&next);
    if nn == 0.0 {
        return Err(Error::DegenerateInput("A_F x = 0".into()));
    }
    next.iter_mut().for_each(|v| *v /= nn);
    let lhs = dot(y, &next).abs();
    let rhs = c * (1.0 + (1.0 - g * g) * (1.0 - c * c) / 2.0);
    Ok(Verdict::from_slack(lhs - rhs, tol, || {
        format!("|y^T x'| = {lhs:.8} below {rhs:.8}")
    }))
}

/// Truncation keeps most of the overlap with a `k_bar`-sparse unit `x_bar`:
/// with `F` the top-`k` entries of a unit `y` and `r = sqrt(k_bar / k)`,
/// `|Truncate(y, F)^T x_bar| >= |y^T x_bar| - r min(1, (1 + r)(1 - (y^T x_bar)^2))`.
pub fn check_truncation_lemma(y: &[f64], x_bar: &[f64], k: usize, tol: f64) -> Result<Verdict> {
    if y.len() != x_bar.len() {
        return Err(Error::invalid("length mismatch"));
    }
    check_unit(y, "y")?;
    check_unit(x_bar, "x_bar")?;
    let k_bar = x_bar.iter().filter(|v| **v != 0.0).count();
    if k == 0 || k > y.len() {
        return Err(Error::invalid(format!("k = {k} outside [1, {}]", y.len())));
    }
    if k <= k_bar {
        return Err(Error::PreconditionViolation(format!("k = {k} must exceed k_bar = {k_bar}")));
    }
    let f = top_k_support(y, k)?;
    let t = truncate(y, &f)?;
    let lhs = dot(&t, x_bar).abs();
    let c = dot(y, x_bar);
    let r = (k_bar as f64 / k as f64).sqrt();
    let rhs = c.abs() - r * (1.0f64).min((1.0 + r) * (1.0 - c * c));
    Ok(Verdict::from_slack(lhs - rhs, tol, || {
        format!("|Truncate(y, F)^T x_bar| = {lhs:.8} below {rhs:.8}")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_example() {
        let b = SymmetricMatrix::diag(&[1.0, 0.0]).unwrap();
        let u = SymmetricMatrix::diag(&[0.0, 1.0]).unwrap();
        assert!(check_weyl(&b, &u, 1e-12).unwrap().is_pass());
        let u3 = SymmetricMatrix::diag(&[1.0, 1.0, 1.0]).unwrap();
        assert!(check_weyl(&b, &u3, 1e-12).is_err());
    }

    #[test]
    fn power_progress_example() {
        let a = SymmetricMatrix::diag(&[2.0, 1.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = check_power_progress(&a, &[h, h], 1e-12).unwrap();
        // lhs = 2/sqrt(5), rhs = (1/sqrt 2)(1 + 0.75 * 0.5 / 2)
        let want = 2.0 / 5f64.sqrt() - h * (1.0 + 0.1875);
        assert!((v.slack().unwrap() - want).abs() < 1e-12);
        assert!(v.is_pass());
    }

    #[test]
    fn power_progress_skips_orthogonal_and_ties() {
        let a = SymmetricMatrix::diag(&[2.0, 1.0]).unwrap();
        assert!(matches!(check_power_progress(&a, &[0.0, 1.0], 0.0).unwrap(), Verdict::Skipped { .. }));
        let tie = SymmetricMatrix::diag(&[1.0, -1.0]).unwrap();
        assert!(matches!(check_power_progress(&tie, &[0.6, 0.8], 0.0).unwrap(), Verdict::Skipped { .. }));
        let zero = SymmetricMatrix::diag(&[0.0, 0.0]).unwrap();
        assert!(matches!(check_power_progress(&zero, &[0.6, 0.8], 0.0), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn truncation_example() {
        let x_bar = [1.0, 0.0, 0.0, 0.0];
        let y = [0.8, 0.6, 0.0, 0.0];
        let v = check_truncation_lemma(&y, &x_bar, 2, 0.0).unwrap();
        assert!(v.is_pass());
        assert!(check_truncation_lemma(&y, &x_bar, 1, 0.0).is_err());
    }

    #[test]
    fn perturbation_example() {
        let a_bar = SymmetricMatrix::diag(&[2.0, 1.0, 0.5]).unwrap();
        let e = SymmetricMatrix::from_fn(3, |i, j| if i == j { 0.0 } else { 0.05 }).unwrap();
        let f = IndexSet::new(vec![0, 1]);
        let v = check_perturbation_lemma(&a_bar, &e, &f, 1e-12).unwrap();
        assert!(v.is_pass(), "{v:?}");
        let big = e.affine(20.0, 0.0);
        assert!(matches!(
            check_perturbation_lemma(&a_bar, &big, &f, 1e-12),
            Err(Error::PreconditionViolation(_))
        ));
        assert!(matches!(
            check_perturbation_lemma(&a_bar, &e, &IndexSet::new(vec![1, 2]), 1e-12),
            Err(Error::PreconditionViolation(_))
        ));
    }
}
