//! Randomized suites that exercise the lemma checkers and the recovery
//! bound on generated instances.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, normalize, symmetric_eigen, IndexSet, SymmetricMatrix};
use crate::rng::{gaussian_vec, stream};
use crate::solver::{tpower_observed, InitStrategy, ShiftPolicy, SolveConfig};
use crate::theory::{
    check_perturbation_lemma, check_power_progress, check_truncation_lemma, check_weyl,
    restricted_spectral_norm, theorem1_bound_check, theorem1_quantities, NormMode, TheoryQuantities,
    TrajectoryRecord, Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub draws: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub min_slack: f64,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            draws: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            min_slack: f64::INFINITY,
            first_failure: None,
        }
    }

    fn record(&mut self, draw: usize, v: &Verdict) {
        self.draws += 1;
        if let Some(s) = v.slack() {
            self.min_slack = self.min_slack.min(s);
        }
        match v {
            Verdict::Pass { .. } => self.passed += 1,
            Verdict::Fail { detail, .. } => {
                self.failed += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(format!("draw {draw}: {detail}"));
                }
            }
            Verdict::Skipped { .. } => self.skipped += 1,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, p: usize) -> SymmetricMatrix {
    let g = gaussian_vec(rng, p * p);
    SymmetricMatrix::from_fn(p, |i, j| (g[i * p + j] + g[j * p + i]) / 2.0).expect("finite entries")
}

fn random_unit(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    loop {
        let mut x = gaussian_vec(rng, p);
        if normalize(&mut x) > 0.0 {
            return x;
        }
    }
}

/// Unit vector supported on `support` with Gaussian entries.
fn random_sparse_unit(rng: &mut ChaCha8Rng, p: usize, support: &[usize]) -> Vec<f64> {
    let vals = random_unit(rng, support.len());
    let mut x = vec![0.0; p];
    for (i, v) in support.iter().zip(vals) {
        x[*i] = v;
    }
    x
}

/// `(I - x x^T) M (I - x x^T)` for unit `x`.
fn project_out(m: &SymmetricMatrix, x: &[f64]) -> SymmetricMatrix {
    let p = m.dim();
    let d = m.to_dense_vec();
    let mx = m.matvec(x).expect("matching length");
    let q = dot(x, &mx);
    SymmetricMatrix::from_fn(p, |i, j| d[i * p + j] - x[i] * mx[j] - mx[i] * x[j] + q * x[i] * x[j])
        .expect("finite entries")
}

/// Absolute slack allowed by every lemma suite.
pub const LEMMA_SLACK: f64 = 1e-12;

/// Weyl's inequalities on `draws` random symmetric pairs of size `p`.
pub fn weyl_suite(draws: usize, p: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("weyl");
    for t in 0..draws {
        let mut rng = stream(seed, t as u64, "weyl");
        let b = random_symmetric(&mut rng, p);
        let u = random_symmetric(&mut rng, p).affine(rng.gen_range(0.01..2.0), 0.0);
        report.record(t, &check_weyl(&b, &u, LEMMA_SLACK)?);
    }
    Ok(report)
}

/// Restricted perturbation lemma on planted instances with `p = 12` and
/// `|F| = 6`, scaling `E` so that `rho(E, 6)` sweeps `(0, gap / 2)`.
pub fn perturbation_suite(draws: usize, seed: u64) -> Result<SuiteReport> {
    const P: usize = 12;
    const S: usize = 6;
    let mut report = SuiteReport::new("perturbation");
    for t in 0..draws {
        let mut rng = stream(seed, t as u64, "perturbation");
        let f: Vec<usize> = sample(&mut rng, P, S).into_vec();
        let k_bar = rng.gen_range(1..=3);
        let x_bar = random_sparse_unit(&mut rng, P, &f[..k_bar]);
        let r = random_symmetric(&mut rng, P);
        let rn = symmetric_eigen(&r).spectral_norm();
        let body = project_out(&r, &x_bar).affine(rng.gen_range(0.0..0.9) / rn, 0.0);
        let spike = SymmetricMatrix::from_fn(P, |i, j| 2.0 * x_bar[i] * x_bar[j])?;
        let a_bar = spike.add(&body)?;
        let eig = symmetric_eigen(&a_bar);
        let gap = eig.values[0] - eig.values[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let g = random_symmetric(&mut rng, P);
        let rho_g = restricted_spectral_norm(&g, S, NormMode::Exact)?.value;
        let tau = rng.gen_range(0.02..0.98);
        let e = g.affine(tau * gap / 2.0 / rho_g, 0.0);
        let f = IndexSet::new(f);
        report.record(t, &check_perturbation_lemma(&a_bar, &e, &f, LEMMA_SLACK)?);
    }
    Ok(report)
}

/// Power-step progress on random symmetric `A_F` of size 2 to 10.
pub fn power_progress_suite(draws: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("power_progress");
    for t in 0..draws {
        let mut rng = stream(seed, t as u64, "power_progress");
        let n = rng.gen_range(2..=10);
        let a = random_symmetric(&mut rng, n);
        let x = random_unit(&mut rng, n);
        report.record(t, &check_power_progress(&a, &x, LEMMA_SLACK)?);
    }
    Ok(report)
}

/// Truncation lemma for `p = 20`, random `k_bar < k` and `y` correlated
/// with `x_bar` to a random degree.
pub fn truncation_suite(draws: usize, seed: u64) -> Result<SuiteReport> {
    const P: usize = 20;
    let mut report = SuiteReport::new("truncation");
    for t in 0..draws {
        let mut rng = stream(seed, t as u64, "truncation");
        let k_bar = rng.gen_range(1..=5);
        let k = rng.gen_range(k_bar + 1..=P);
        let support = sample(&mut rng, P, k_bar).into_vec();
        let x_bar = random_sparse_unit(&mut rng, P, &support);
        let noise = random_unit(&mut rng, P);
        let w: f64 = rng.gen_range(0.0..1.0);
        let mut y: Vec<f64> = x_bar.iter().zip(&noise).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        if normalize(&mut y) == 0.0 {
            continue;
        }
        report.record(t, &check_truncation_lemma(&y, &x_bar, k, LEMMA_SLACK)?);
    }
    Ok(report)
}

/// A spiked instance on which every precondition of the recovery bound
/// holds, together with a start vector inside its basin.
#[derive(Debug, Clone)]
pub struct TheoremInstance {
    pub a_bar: SymmetricMatrix,
    pub e: SymmetricMatrix,
    pub a: SymmetricMatrix,
    pub x_bar: Vec<f64>,
    pub x0: Vec<f64>,
    pub quantities: TheoryQuantities,
    /// `min(2k + k_bar, p)`, the subset size at which `rho` was evaluated.
    pub rho_subset: usize,
}

/// Contraction bound quantity `u` that maximizes `u (1 - u^2)`.
pub const THEOREM_U: f64 = 0.577_350_269_189_625_8;

/// Builds an instance with a 1-sparse `x_bar`, `A_bar = x_bar x_bar^T + B`
/// where `B` lives on the complement of `x_bar`, and a small dense `E`.
///
/// The contraction factor needs `sqrt(k_bar / k) < 0.1925`, so only
/// `k >= 27 k_bar` qualifies; with `p <= 30` that means `k_bar = 1` and
/// `2k + k_bar > p`, where `rho(E, s)` is the full spectral norm of `E`.
pub fn theorem_instance(p: usize, k: usize, seed: u64, trial: u64) -> Result<TheoremInstance> {
    if k == 0 || k > p {
        return Err(Error::invalid(format!("k = {k} outside [1, {p}]")));
    }
    let mut rng = stream(seed, trial, "theorem");
    let j = rng.gen_range(0..p);
    let mut x_bar = vec![0.0; p];
    x_bar[j] = 1.0;
    let r = random_symmetric(&mut rng, p);
    let rn = symmetric_eigen(&r).spectral_norm();
    let beta = rng.gen_range(0.01..0.05);
    let body = project_out(&r, &x_bar).affine(beta / rn, 0.0);
    let spike = SymmetricMatrix::from_fn(p, |a, b| x_bar[a] * x_bar[b])?;
    let a_bar = spike.add(&body)?;
    let eig = symmetric_eigen(&a_bar);
    let lambda = eig.values[0];
    let gap = lambda - eig.values[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g = random_symmetric(&mut rng, p);
    let rho_subset = (2 * k + 1).min(p);
    let rho_g = restricted_spectral_norm(&g, rho_subset, NormMode::Exact)?.value;
    let mut eps = 5e-3;
    let mut found = None;
    for _ in 0..40 {
        let q = theorem1_quantities(lambda, gap, eps, k, 1, THEOREM_U)?;
        if q.preconditions_met && THEOREM_U + q.delta < 0.9 {
            found = Some(q);
            break;
        }
        eps /= 2.0;
    }
    let quantities = found.ok_or_else(|| {
        Error::PreconditionViolation(format!("no perturbation level satisfies the bound for k = {k}, p = {p}"))
    })?;
    let e = g.affine(quantities.rho / rho_g, 0.0);
    let a = a_bar.add(&e)?;

    let omega = rng.gen_range(THEOREM_U + quantities.delta + 0.01..0.95);
    let others: Vec<usize> = sample(&mut rng, p - 1, k - 1)
        .into_iter()
        .map(|i| if i >= j { i + 1 } else { i })
        .collect();
    let mut x0 = random_sparse_unit(&mut rng, p, &others);
    if others.is_empty() {
        x0 = x_bar.clone();
    } else {
        let tail = (1.0 - omega * omega).sqrt();
        x0.iter_mut().for_each(|v| *v *= tail);
        x0[j] = omega;
    }
    Ok(TheoremInstance {
        a_bar,
        e,
        a,
        x_bar,
        x0,
        quantities,
        rho_subset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremRun {
    pub p: usize,
    pub k: usize,
    pub rho_subset: usize,
    pub quantities: TheoryQuantities,
    pub record: TrajectoryRecord,
}

/// Maximum iterations followed per run.
const THEOREM_MAX_ITER: usize = 60;

/// Runs the solver on `instances` generated problems (`p` in 28..=30,
/// `k` in 28..=p) and checks every overlap trajectory against the bound.
pub fn theorem_suite(instances: usize, seed: u64) -> Result<(SuiteReport, Vec<TheoremRun>)> {
    let mut report = SuiteReport::new("theorem");
    let mut runs = Vec::with_capacity(instances);
    for t in 0..instances {
        let mut rng = stream(seed, t as u64, "theorem-shape");
        let p = rng.gen_range(28..=30);
        let k = rng.gen_range(28..=p);
        let inst = theorem_instance(p, k, seed, t as u64)?;
        let config = SolveConfig::new(k)
            .with_shift(ShiftPolicy::None)
            .with_tol(0.0)
            .with_max_iter(THEOREM_MAX_ITER)
            .with_init(InitStrategy::Custom(inst.x0.clone()));
        let mut overlaps = Vec::new();
        tpower_observed(&inst.a, &config, &mut |x| overlaps.push(dot(x.values(), &inst.x_bar).abs()))?;
        let record = theorem1_bound_check(&overlaps, &inst.quantities)?;
        let verdict = match record.violation {
            None => Verdict::Pass {
                slack: record.min_slack,
            },
            Some(it) => Verdict::Fail {
                slack: record.min_slack,
                detail: format!("bound exceeded at iteration {it} (p = {p}, k = {k})"),
            },
        };
        report.record(t, &verdict);
        runs.push(TheoremRun {
            p,
            k,
            rho_subset: inst.rho_subset,
            quantities: inst.quantities,
            record,
        });
    }
    Ok((report, runs))
}

/// Growth of `rho(E, s)` with `s` for sample covariance noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScaling {
    pub p: usize,
    pub n: usize,
    pub s_values: Vec<usize>,
    /// `rho[seed][i]` is `rho(E, s_values[i])` for that seed.
    pub rho: Vec<Vec<f64>>,
    pub mean_rho: Vec<f64>,
    /// Whether each `s` was evaluated exactly or by sampling.
    pub exact: Vec<bool>,
    /// Least-squares slope of `log mean_rho` against `log s`.
    pub slope: f64,
}

/// Restarts used when `C(p, s)` exceeds the exact budget.
const SCALING_RESTARTS: usize = 12;

/// `E = S_n - A_bar` with `A_bar = x_bar x_bar^T + I` (`x_bar` uniform on
/// the first five coordinates) and `S_n` the sample covariance of `n` draws.
pub fn restricted_norm_scaling(p: usize, n: usize, s_values: &[usize], seeds: usize, seed: u64) -> Result<NormScaling> {
    if p < 5 || n == 0 || seeds == 0 || s_values.len() < 2 {
        return Err(Error::invalid("need p >= 5, n >= 1, at least one seed and two subset sizes"));
    }
    let x_bar: Vec<f64> = (0..p).map(|i| if i < 5 { 1.0 / 5f64.sqrt() } else { 0.0 }).collect();
    let lift = 2f64.sqrt() - 1.0;
    let exact: Vec<bool> = s_values
        .iter()
        .map(|&s| crate::theory::binomial(p, s) <= crate::theory::DEFAULT_NORM_BUDGET)
        .collect();
    let mut rho = Vec::with_capacity(seeds);
    for t in 0..seeds {
        let mut rng = stream(seed, t as u64, "norm-scaling");
        let mut cov = vec![0.0; p * p];
        for _ in 0..n {
            let mut x = gaussian_vec(&mut rng, p);
            let c = lift * dot(&x_bar, &x);
            x.iter_mut().zip(&x_bar).for_each(|(v, b)| *v += c * b);
            for i in 0..p {
                for j in 0..p {
                    cov[i * p + j] += x[i] * x[j];
                }
            }
        }
        let e = SymmetricMatrix::from_fn(p, |i, j| {
            let truth = x_bar[i] * x_bar[j] + if i == j { 1.0 } else { 0.0 };
            cov[i * p + j] / n as f64 - truth
        })?;
        let mut row = Vec::with_capacity(s_values.len());
        for (&s, &ex) in s_values.iter().zip(&exact) {
            let mode = if ex {
                NormMode::Exact
            } else {
                NormMode::Sampled {
                    restarts: SCALING_RESTARTS,
                    seed: seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                }
            };
            row.push(restricted_spectral_norm(&e, s, mode)?.value);
        }
        rho.push(row);
    }
    let mean_rho: Vec<f64> = (0..s_values.len())
        .map(|i| rho.iter().map(|r| r[i]).sum::<f64>() / seeds as f64)
        .collect();
    let xs: Vec<f64> = s_values.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = mean_rho.iter().map(|r| r.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(NormScaling {
        p,
        n,
        s_values: s_values.to_vec(),
        rho,
        mean_rho,
        exact,
        slope,
    })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_suites_pass() {
        for r in [
            weyl_suite(50, 8, 1).unwrap(),
            perturbation_suite(20, 2).unwrap(),
            power_progress_suite(200, 3).unwrap(),
            truncation_suite(200, 4).unwrap(),
        ] {
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn theorem_instances_meet_preconditions() {
        let inst = theorem_instance(30, 30, 5, 0).unwrap();
        assert!(inst.quantities.preconditions_met);
        assert_eq!(inst.rho_subset, 30);
        let o0 = dot(&inst.x0, &inst.x_bar).abs();
        assert!(o0 >= THEOREM_U + inst.quantities.delta);
        assert!(inst.x0.iter().filter(|v| **v != 0.0).count() <= 30);
        assert!(theorem_instance(30, 10, 5, 0).is_err());
    }

    #[test]
    fn theorem_suite_small() {
        let (r, runs) = theorem_suite(3, 11).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(runs.len(), 3);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = [1.0f64, 2.0, 4.0].iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = [1.0f64, 2.0, 4.0].iter().map(|v| (3.0 * v.sqrt()).ln()).collect();
        assert!((least_squares_slope(&xs, &ys) - 0.5).abs() < 1e-12);
    }
}
