//! Numerical checks of the recovery theory for the truncated power method:
//! enumeration oracles, the restricted perturbation norm `rho(E, s)`, the
//! contraction quantities of the main recovery bound, and per-lemma checkers.

mod lemmas;
mod oracle;
mod suite;

pub use lemmas::{
    check_perturbation_lemma, check_power_progress, check_truncation_lemma, check_weyl, Verdict,
};
pub use oracle::{
    binomial, brute_force_dks, brute_force_dks_with_budget, brute_force_smallest_sparse_eig,
    brute_force_sparse_eig, brute_force_sparse_eig_with_budget, DEFAULT_ORACLE_BUDGET,
};
pub use suite::{
    perturbation_suite, power_progress_suite, restricted_norm_scaling, theorem_instance, theorem_suite,
    truncation_suite, weyl_suite, NormScaling, SuiteReport, TheoremInstance, TheoremRun, LEMMA_SLACK, THEOREM_U,
};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, IndexSet, SymmetricMatrix};

/// Subset budget for the exact restricted norm.
pub const DEFAULT_NORM_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Enumerate every s-subset.
    Exact,
    /// Random s-subsets, each polished by single-swap local search. The
    /// result is a lower bound on the true value.
    Sampled { restarts: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedNorm {
    pub value: f64,
    pub exact: bool,
    /// A maximizing subset.
    pub subset: IndexSet,
}

fn sub_norm(dense: &[f64], p: usize, idx: &[usize]) -> f64 {
    let s = idx.len();
    let mut m = vec![0.0; s * s];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[a * s + b] = dense[i * p + j];
        }
    }
    jacobi_eigen(&m, s).spectral_norm()
}

/// `rho(E, s) = max_{|F| <= s} ||E_F||_2`. The maximum over `|F| <= s` is
/// attained at `|F| = s` (interlacing), so only s-subsets are visited.
pub fn restricted_spectral_norm(e: &SymmetricMatrix, s: usize, mode: NormMode) -> Result<RestrictedNorm> {
    restricted_spectral_norm_with_budget(e, s, mode, DEFAULT_NORM_BUDGET)
}

pub fn restricted_spectral_norm_with_budget(
    e: &SymmetricMatrix,
    s: usize,
    mode: NormMode,
    budget: u128,
) -> Result<RestrictedNorm> {
    let p = e.dim();
    if s == 0 || s > p {
        return Err(Error::invalid(format!("subset size s = {s} outside [1, {p}]")));
    }
    let dense = e.to_dense_vec();
    match mode {
        NormMode::Exact => {
            oracle::check_budget(p, s, budget, "; use sampled mode")?;
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for subset in (0..p).combinations(s) {
                let v = sub_norm(&dense, p, &subset);
                if v > best.0 {
                    best = (v, subset);
                }
            }
            Ok(RestrictedNorm {
                value: best.0,
                exact: true,
                subset: IndexSet::new(best.1),
            })
        }
        NormMode::Sampled { restarts, seed } => {
            if restarts == 0 {
                return Err(Error::invalid("sampled mode needs at least one restart"));
            }
            if s == p {
                return Ok(RestrictedNorm {
                    value: sub_norm(&dense, p, &(0..p).collect::<Vec<_>>()),
                    exact: true,
                    subset: IndexSet::full(p),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = (f64::NEG_INFINITY, Vec::new());
            let all: Vec<usize> = (0..p).collect();
            for _ in 0..restarts {
                let mut perm = all.clone();
                perm.shuffle(&mut rng);
                let (mut inside, mut outside) = (perm[..s].to_vec(), perm[s..].to_vec());
                let mut value = sub_norm(&dense, p, &inside);
                'improve: loop {
                    for a in 0..s {
                        for b in 0..outside.len() {
                            std::mem::swap(&mut inside[a], &mut outside[b]);
                            let v = sub_norm(&dense, p, &inside);
                            if v > value * (1.0 + 1e-12) {
                                value = v;
                                continue 'improve;
                            }
                            std::mem::swap(&mut inside[a], &mut outside[b]);
                        }
                    }
                    break;
                }
                if value > best.0 {
                    best = (value, inside);
                }
            }
            Ok(RestrictedNorm {
                value: best.0,
                exact: false,
                subset: IndexSet::new(best.1),
            })
        }
    }
}

/// Contraction quantities of the recovery bound for a spiked instance
/// `A = A_bar + E` with `A_bar x_bar = lambda x_bar`, gap `gap` and
/// `rho = rho(E, 2k + k_bar)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryQuantities {
    pub lambda: f64,
    pub gap: f64,
    pub rho: f64,
    pub k: usize,
    pub k_bar: usize,
    pub s: usize,
    pub u: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub preconditions_met: bool,
    /// Human-readable list of the preconditions that fail.
    pub violations: Vec<String>,
}

/// `gamma(s) = (lambda - gap + rho) / (lambda - rho)`.
pub fn gamma(lambda: f64, gap: f64, rho: f64) -> f64 {
    (lambda - gap + rho) / (lambda - rho)
}

/// `delta(s) = sqrt(2) rho / sqrt(rho^2 + (gap - 2 rho)^2)`.
pub fn delta(gap: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    std::f64::consts::SQRT_2 * rho / (rho * rho + (gap - 2.0 * rho).powi(2)).sqrt()
}

pub fn theorem1_quantities(
    lambda: f64,
    gap: f64,
    rho: f64,
    k: usize,
    k_bar: usize,
    u: f64,
) -> Result<TheoryQuantities> {
    if !(lambda > 0.0) || !(gap > 0.0) || gap > lambda {
        return Err(Error::invalid(format!(
            "need lambda > 0 and 0 < gap <= lambda (lambda = {lambda}, gap = {gap})"
        )));
    }
    if !(rho >= 0.0) || k_bar == 0 || k == 0 || !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid("need rho >= 0, k, k_bar >= 1 and u in [0, 1]"));
    }
    let r = (k_bar as f64 / k as f64).sqrt();
    let g = gamma(lambda, gap, rho);
    let d = delta(gap, rho);
    let mu1 = (1.0 - g * g) * u * (1.0 - u * u) / 2.0 - (2.0 * d + r);
    let mu2 = ((1.0 + 3.0 * r) * (1.0 - 0.45 * (1.0 - g * g))).sqrt();
    let mu = (1.0 - mu1).sqrt().max(mu2);
    let mut violations = Vec::new();
    if rho > gap / 2.0 {
        violations.push(format!("rho = {rho:.4e} exceeds gap / 2 = {:.4e}", gap / 2.0));
    }
    if k < 4 * k_bar {
        violations.push(format!("k = {k} below 4 k_bar = {}", 4 * k_bar));
    }
    if !(mu1 > 0.0 && mu1 < 1.0) {
        violations.push(format!("mu1 = {mu1:.4} outside (0, 1)"));
    }
    if !(mu2 < 1.0) {
        violations.push(format!("mu2 = {mu2:.4} not below 1"));
    }
    Ok(TheoryQuantities {
        lambda,
        gap,
        rho,
        k,
        k_bar,
        s: 2 * k + k_bar,
        u,
        gamma: g,
        delta: d,
        mu1,
        mu2,
        mu,
        preconditions_met: violations.is_empty(),
        violations,
    })
}

/// Overlap trajectory of one run against the recovery bound
/// `sqrt(1 - o_t) <= mu^t sqrt(1 - o_0) + sqrt(5) delta / (1 - mu2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub overlaps: Vec<f64>,
    pub lhs: Vec<f64>,
    pub bound: Vec<f64>,
    /// First iteration at which the bound fails, if any.
    pub violation: Option<usize>,
    /// `min_t (bound_t - lhs_t)`.
    pub min_slack: f64,
}

/// Absolute slack allowed for floating point when comparing against the bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Checks a trajectory of overlaps `o_t = |x_t^T x_bar|`.
pub fn theorem1_bound_check(overlaps: &[f64], q: &TheoryQuantities) -> Result<TrajectoryRecord> {
    if !q.preconditions_met {
        return Err(Error::PreconditionViolation(q.violations.join("; ")));
    }
    let Some(&o0) = overlaps.first() else {
        return Err(Error::invalid("empty overlap trajectory"));
    };
    if o0 < q.u + q.delta {
        return Err(Error::PreconditionViolation(format!(
            "initial overlap {o0:.4} below u + delta = {:.4}",
            q.u + q.delta
        )));
    }
    let floor = 5f64.sqrt() * q.delta / (1.0 - q.mu2);
    let start = (1.0 - o0).max(0.0).sqrt();
    let mut lhs = Vec::with_capacity(overlaps.len());
    let mut bound = Vec::with_capacity(overlaps.len());
    let mut violation = None;
    let mut min_slack = f64::INFINITY;
    for (t, &o) in overlaps.iter().enumerate() {
        let l = (1.0 - o.min(1.0)).max(0.0).sqrt();
        let b = q.mu.powi(t as i32) * start + floor;
        if l > b + BOUND_SLACK && violation.is_none() {
            violation = Some(t);
        }
        min_slack = min_slack.min(b - l);
        lhs.push(l);
        bound.push(b);
    }
    Ok(TrajectoryRecord {
        overlaps: overlaps.to_vec(),
        lhs,
        bound,
        violation,
        min_slack,
    })
}
