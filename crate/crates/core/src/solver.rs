//! Truncated power iteration for the largest (and smallest) k-sparse
//! eigenvalue problem, with its initialization schemes.
//!
//! One step maps `x` to `Truncate(A x, F) / ||.||` where `F` holds the `k`
//! largest magnitudes of `A x`. For positive semidefinite `A` the Rayleigh
//! quotient never decreases along the iterates; indefinite matrices are
//! handled by running on `A + sI` (see [`ShiftPolicy`]). Reported objectives
//! always refer to the matrix the caller passed in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::operator::{Affine, SymmetricOperator};
use crate::linalg::vector::{dot, normalize, top_k_support, top_k_values, truncate, IndexSet, SparseUnitVector};
use crate::linalg::leading_eigenpair;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_WARM_FACTOR: f64 = 0.5;

/// Power iterations per side used by [`ShiftPolicy::Auto`] to compare
/// `lambda_max` against `-lambda_min`.
const SHIFT_PROBE_ITERS: usize = 20;

/// Above this dimension backward elimination logs a cost warning.
const BACKWARD_ELIMINATION_WARN_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPolicy {
    /// Iterate on `A` as given.
    None,
    /// Probe the spectrum and shift by the Gershgorin bound if the most
    /// negative eigenvalue looks larger in magnitude than the largest one.
    Auto,
    /// Iterate on `A + value * I`.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// `e_j` with `j = argmax_i A_ii`.
    TopDiagonalSingle,
    /// Normalized indicator of the `k` largest diagonal entries.
    TopDiagonalIndicator,
    /// Solve at cardinalities `k0, ceil(factor * k0), ...` and hand the last
    /// output down. `k0 = None` means `min(p, 4k)`.
    WarmStart { k0: Option<usize>, factor: f64 },
    /// Greedy backward elimination of variables (small `p` only).
    BackwardElimination,
    /// A caller-supplied start, normalized. It may be denser than `k`; the
    /// first iteration truncates.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub shift: ShiftPolicy,
    pub init: InitStrategy,
    pub seed: u64,
}

impl SolveConfig {
    pub fn new(k: usize) -> Self {
        SolveConfig {
            k,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            shift: ShiftPolicy::Auto,
            init: InitStrategy::TopDiagonalSingle,
            seed: 0,
        }
    }

    pub fn with_init(mut self, init: InitStrategy) -> Self {
        self.init = init;
        self
    }

    pub fn with_shift(mut self, shift: ShiftPolicy) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.k == 0 || self.k > p {
            return Err(Error::invalid(format!("cardinality k = {} outside [1, {p}]", self.k)));
        }
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            return Err(Error::invalid(format!("tolerance {} must be finite and >= 0", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        if let ShiftPolicy::Fixed(s) = self.shift {
            if !s.is_finite() {
                return Err(Error::invalid("fixed shift must be finite"));
            }
        }
        match &self.init {
            InitStrategy::WarmStart { k0, factor } => {
                if !(*factor > 0.0 && *factor < 1.0) {
                    return Err(Error::invalid(format!("warm-start factor {factor} outside (0, 1)")));
                }
                if let Some(k0) = k0 {
                    if *k0 < self.k || *k0 > p {
                        return Err(Error::invalid(format!(
                            "warm-start k0 = {k0} outside [{}, {p}]",
                            self.k
                        )));
                    }
                }
            }
            InitStrategy::Custom(x) if x.len() != p => {
                return Err(Error::invalid(format!(
                    "custom start has length {}, expected {p}",
                    x.len()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub objective: f64,
    pub support: IndexSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseEigenResult {
    pub x: SparseUnitVector,
    /// `x^T A x` for the caller's (unshifted) matrix.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub shift_used: f64,
    /// Entry 0 is the starting vector, entry `t` the `t`-th iterate.
    pub trace: Vec<TraceEntry>,
}

/// Runs the truncated power method on `a`.
pub fn tpower<O: SymmetricOperator + ?Sized>(a: &O, config: &SolveConfig) -> Result<SparseEigenResult> {
    tpower_observed(a, config, &mut |_| {})
}

/// [`tpower`] that also hands every iterate, starting with `x_0`, to
/// `observer`.
pub fn tpower_observed<O: SymmetricOperator + ?Sized>(
    a: &O,
    config: &SolveConfig,
    observer: &mut dyn FnMut(&SparseUnitVector),
) -> Result<SparseEigenResult> {
    config.validate(a.dim())?;
    let shift = resolve_shift(a, config);
    let shifted = Affine::shifted(a, shift);
    let x0 = initial_vector(&shifted, config)?;
    let run = iterate(&shifted, x0, config.k, config.tol, config.max_iter, observer)?;
    finish(a, run, shift, |q| q - shift)
}

/// Truncated power method on `cI - A` with `c` above `lambda_max(A)`, which
/// heuristically minimizes `x^T A x` over k-sparse unit vectors.
pub fn smallest_sparse_eig<O: SymmetricOperator + ?Sized>(
    a: &O,
    config: &SolveConfig,
) -> Result<SparseEigenResult> {
    config.validate(a.dim())?;
    let ub = a.upper_bound();
    let c = ub + 1e-3 * ub.abs().max(1.0);
    let reflected = Affine::reflected(a, c);
    let x0 = initial_vector(&reflected, config)?;
    let run = iterate(&reflected, x0, config.k, config.tol, config.max_iter, &mut |_| {})?;
    finish(a, run, c, |q| c - q)
}

fn finish<O: SymmetricOperator + ?Sized>(
    a: &O,
    mut run: Iterated,
    shift: f64,
    to_original: impl Fn(f64) -> f64,
) -> Result<SparseEigenResult> {
    for e in &mut run.trace {
        e.objective = to_original(e.objective);
    }
    let mut ax = vec![0.0; a.dim()];
    a.apply(run.x.values(), &mut ax);
    let objective = dot(run.x.values(), &ax);
    Ok(SparseEigenResult {
        x: run.x,
        objective,
        iterations: run.iterations,
        converged: run.converged,
        shift_used: shift,
        trace: run.trace,
    })
}

struct Iterated {
    x: SparseUnitVector,
    iterations: usize,
    converged: bool,
    trace: Vec<TraceEntry>,
}

/// Core loop on an already shifted operator. Trace objectives are those of
/// `op` itself.
fn iterate<O: SymmetricOperator + ?Sized>(
    op: &O,
    x0: SparseUnitVector,
    k: usize,
    tol: f64,
    max_iter: usize,
    observer: &mut dyn FnMut(&SparseUnitVector),
) -> Result<Iterated> {
    let p = op.dim();
    observer(&x0);
    let mut y = vec![0.0; p];
    op.apply(x0.values(), &mut y);
    let mut q_prev = dot(x0.values(), &y);
    let mut trace = vec![TraceEntry {
        objective: q_prev,
        support: x0.support().clone(),
    }];
    let mut x = x0;
    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=max_iter {
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::DegenerateIterate { iteration: t });
        }
        let support = top_k_support(&y, k)?;
        let mut next = truncate(&y, &support)?;
        normalize(&mut next);
        x = SparseUnitVector::from_parts_unchecked(next, support);
        debug_assert!(x.nnz() <= k);
        observer(&x);
        op.apply(x.values(), &mut y);
        let q = dot(x.values(), &y);
        trace.push(TraceEntry {
            objective: q,
            support: x.support().clone(),
        });
        iterations = t;
        if (q - q_prev).abs() <= tol {
            converged = true;
            break;
        }
        q_prev = q;
    }
    Ok(Iterated {
        x,
        iterations,
        converged,
        trace,
    })
}

fn resolve_shift<O: SymmetricOperator + ?Sized>(a: &O, config: &SolveConfig) -> f64 {
    match config.shift {
        ShiftPolicy::None => 0.0,
        ShiftPolicy::Fixed(s) => s,
        ShiftPolicy::Auto => {
            let c = a.radius_bound();
            if c <= 0.0 {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let start: Vec<f64> = (0..a.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let top = probe(&Affine::shifted(a, c), &start) - c;
            let neg_bottom = probe(&Affine::reflected(a, c), &start) - c;
            if neg_bottom > top {
                log::debug!("auto shift: -lambda_min ~ {neg_bottom:.4e} > lambda_max ~ {top:.4e}");
                a.psd_shift()
            } else {
                0.0
            }
        }
    }
}

/// Rayleigh quotient after a fixed number of power steps on a PSD operator.
fn probe<O: SymmetricOperator + ?Sized>(op: &O, start: &[f64]) -> f64 {
    let mut x = start.to_vec();
    normalize(&mut x);
    let mut y = vec![0.0; x.len()];
    for _ in 0..SHIFT_PROBE_ITERS {
        op.apply(&x, &mut y);
        if normalize(&mut y) == 0.0 {
            return 0.0;
        }
        std::mem::swap(&mut x, &mut y);
    }
    op.apply(&x, &mut y);
    dot(&x, &y)
}

fn initial_vector<O: SymmetricOperator + ?Sized>(op: &O, config: &SolveConfig) -> Result<SparseUnitVector> {
    let k = config.k;
    match &config.init {
        InitStrategy::TopDiagonalSingle => init_top_diagonal(op, k, DiagonalInit::Single),
        InitStrategy::TopDiagonalIndicator => init_top_diagonal(op, k, DiagonalInit::Indicator),
        InitStrategy::WarmStart { k0, factor } => {
            let k0 = k0.unwrap_or_else(|| (4 * k).min(op.dim()));
            warm_start(op, k, k0, *factor, config.tol, config.max_iter)
        }
        InitStrategy::BackwardElimination => init_backward_elimination(op, k),
        InitStrategy::Custom(x) => {
            if x.iter().all(|v| *v == 0.0) {
                return Err(Error::invalid("custom start vector is zero"));
            }
            SparseUnitVector::from_dense(x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalInit {
    Single,
    Indicator,
}

/// Start from the largest diagonal entry (or the top-`k` diagonal entries).
/// The single-coordinate start already achieves `Q(x0) >= lambda_max(A, k) / k`.
pub fn init_top_diagonal<O: SymmetricOperator + ?Sized>(
    a: &O,
    k: usize,
    mode: DiagonalInit,
) -> Result<SparseUnitVector> {
    let d = a.diagonal();
    match mode {
        DiagonalInit::Single => {
            let j = top_k_values(&d, 1)?.as_slice()[0];
            SparseUnitVector::basis(d.len(), j)
        }
        DiagonalInit::Indicator => SparseUnitVector::indicator(d.len(), top_k_values(&d, k)?),
    }
}

/// Cardinality schedule `k0 > ceil(factor k0) > ... > k` (each stage strictly
/// smaller, clamped at `k`), excluding `k` itself.
pub fn warm_start_schedule(k: usize, k0: usize, factor: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut kk = k0;
    while kk > k {
        out.push(kk);
        let next = (factor * kk as f64).ceil() as usize;
        kk = next.min(kk - 1).max(k);
    }
    out
}

/// Runs the solver at each cardinality of [`warm_start_schedule`], starting
/// from the top-diagonal vector, and returns the last stage's output cut down
/// to `k` entries. With `k0 == k` this is the plain top-diagonal start.
pub fn init_warm_start_schedule<O: SymmetricOperator + ?Sized>(
    a: &O,
    k: usize,
    k0: usize,
    factor: f64,
) -> Result<SparseUnitVector> {
    let p = a.dim();
    if k == 0 || k > p || k0 < k || k0 > p {
        return Err(Error::invalid(format!("need 1 <= k <= k0 <= p, got k = {k}, k0 = {k0}, p = {p}")));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::invalid(format!("warm-start factor {factor} outside (0, 1)")));
    }
    warm_start(a, k, k0, factor, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

fn warm_start<O: SymmetricOperator + ?Sized>(
    a: &O,
    k: usize,
    k0: usize,
    factor: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SparseUnitVector> {
    let mut x = init_top_diagonal(a, k, DiagonalInit::Single)?;
    for kk in warm_start_schedule(k, k0, factor) {
        let start = x.truncated_to(kk)?;
        x = iterate(a, start, kk, tol, max_iter, &mut |_| {})?.x;
    }
    x.truncated_to(k)
}

/// Greedy backward elimination: drop, one at a time, the variable whose
/// removal keeps the largest leading eigenvalue, until `k` remain; return
/// the leading eigenvector on the survivors. Guarantees
/// `Q >= (k / p) lambda_max(A)` for PSD `A`.
pub fn init_backward_elimination<O: SymmetricOperator + ?Sized>(a: &O, k: usize) -> Result<SparseUnitVector> {
    let p = a.dim();
    if k == 0 || k > p {
        return Err(Error::invalid(format!("cardinality k = {k} outside [1, {p}]")));
    }
    if p > BACKWARD_ELIMINATION_WARN_DIM {
        log::warn!("backward elimination on p = {p} needs {} eigen-solves", (p - k) * p);
    }
    let full = a.principal_submatrix(&IndexSet::full(p))?;
    let diag = full.diagonal();
    let mut keep: Vec<usize> = (0..p).collect();
    while keep.len() > k {
        // Ties go to dropping the variable with the smaller diagonal.
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..keep.len() {
            let mut rest = keep.clone();
            rest.remove(pos);
            let sub = full.principal_submatrix(&IndexSet::new(rest))?;
            let (lambda, _) = leading_eigenpair(&sub)?;
            let better = match best {
                None => true,
                Some((b, bp)) => lambda > b || (lambda == b && diag[keep[pos]] < diag[keep[bp]]),
            };
            if better {
                best = Some((lambda, pos));
            }
        }
        keep.remove(best.expect("non-empty candidate list").1);
    }
    embed_leading(&full, IndexSet::new(keep))
}

/// `x(F)`: the leading eigenvector of `A_F`, embedded in `R^p`.
pub fn restricted_leading_vector(
    a: &crate::linalg::SymmetricMatrix,
    f: IndexSet,
) -> Result<SparseUnitVector> {
    embed_leading(a, f)
}

fn embed_leading(a: &crate::linalg::SymmetricMatrix, f: IndexSet) -> Result<SparseUnitVector> {
    let sub = a.principal_submatrix(&f)?;
    let (_, v) = leading_eigenpair(&sub)?;
    let mut x = vec![0.0; a.dim()];
    for (i, vi) in f.iter().zip(&v) {
        x[i] = *vi;
    }
    SparseUnitVector::from_truncated(&x, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::theory::brute_force_sparse_eig;
    use rand::Rng;

    fn random_psd(p: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        let n = p + 3;
        let d: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(rng)).collect();
        SymmetricMatrix::from_fn(p, |i, j| (0..n).map(|r| d[r * p + i] * d[r * p + j]).sum()).unwrap()
    }

    fn random_symmetric(p: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(p, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn diagonal_fixed_point() {
        let a = SymmetricMatrix::diag(&[3.0, 2.0, 1.0]).unwrap();
        let cfg = SolveConfig::new(1).with_init(InitStrategy::Custom(vec![1.0, 0.0, 0.0]));
        let r = tpower(&a, &cfg).unwrap();
        assert_eq!(r.x.values(), &[1.0, 0.0, 0.0]);
        assert_eq!(r.objective, 3.0);
        assert!(r.converged && r.iterations <= 2);
    }

    #[test]
    fn all_ones_start_finds_largest_diagonal() {
        let a = SymmetricMatrix::diag(&[1.0, 2.0, 3.0]).unwrap();
        let (oracle, _) = brute_force_sparse_eig(&a, 1).unwrap();
        let cfg = SolveConfig::new(1).with_init(InitStrategy::Custom(vec![1.0; 3]));
        let r = tpower(&a, &cfg).unwrap();
        assert_eq!(r.x.support().as_slice(), &[2]);
        assert_eq!(r.objective, oracle);
    }

    #[test]
    fn rejects_bad_config() {
        let a = SymmetricMatrix::identity(3).unwrap();
        assert!(matches!(tpower(&a, &SolveConfig::new(0)), Err(Error::InvalidArgument(_))));
        assert!(matches!(tpower(&a, &SolveConfig::new(4)), Err(Error::InvalidArgument(_))));
        assert!(tpower(&a, &SolveConfig::new(1).with_tol(-1.0)).is_err());
        let warm = InitStrategy::WarmStart { k0: Some(1), factor: 0.5 };
        assert!(tpower(&a, &SolveConfig::new(2).with_init(warm)).is_err());
        let warm = InitStrategy::WarmStart { k0: None, factor: 1.0 };
        assert!(tpower(&a, &SolveConfig::new(2).with_init(warm)).is_err());
        assert!(tpower(&a, &SolveConfig::new(2).with_init(InitStrategy::Custom(vec![0.0; 3]))).is_err());
    }

    #[test]
    fn zero_product_is_degenerate() {
        let a = SymmetricMatrix::diag(&[0.0, 1.0]).unwrap();
        let cfg = SolveConfig::new(1)
            .with_shift(ShiftPolicy::None)
            .with_init(InitStrategy::Custom(vec![1.0, 0.0]));
        assert!(matches!(tpower(&a, &cfg), Err(Error::DegenerateIterate { iteration: 1 })));
    }

    #[test]
    fn auto_shift_recovers_positive_end_of_indefinite_matrix() {
        // lambda = -5 dominates in magnitude; the sparse maximizer is e2 with value 1.
        let a = SymmetricMatrix::diag(&[-5.0, 1.0, 0.5]).unwrap();
        let start = InitStrategy::Custom(vec![1.0, 1.0, 1.0]);
        let plain = tpower(&a, &SolveConfig::new(1).with_shift(ShiftPolicy::None).with_init(start.clone())).unwrap();
        assert_eq!(plain.objective, -5.0);
        let auto = tpower(&a, &SolveConfig::new(1).with_init(start)).unwrap();
        assert_eq!(auto.shift_used, 5.0);
        assert_eq!(auto.objective, 1.0);
        assert_eq!(auto.trace.last().unwrap().objective, 1.0);
    }

    #[test]
    fn smallest_examples() {
        let a = SymmetricMatrix::diag(&[3.0, 2.0, 1.0]).unwrap();
        let r = smallest_sparse_eig(&a, &SolveConfig::new(1)).unwrap();
        assert_eq!(r.x.support().as_slice(), &[2]);
        assert!((r.objective - 1.0).abs() < 1e-12);

        let i3 = SymmetricMatrix::identity(3).unwrap();
        let r = smallest_sparse_eig(&i3, &SolveConfig::new(2)).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-12);
        assert_eq!(r.x.support().len(), 2);
    }

    #[test]
    fn smallest_respects_enumeration_minimum() {
        use crate::linalg::symmetric_eigen;
        use itertools::Itertools;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_psd(10, &mut rng);
            let bf_min = (0..10)
                .combinations(3)
                .map(|s| {
                    let sub = a.principal_submatrix(&IndexSet::new(s)).unwrap();
                    *symmetric_eigen(&sub).values.last().unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            let r = smallest_sparse_eig(&a, &SolveConfig::new(3)).unwrap();
            assert!(r.objective >= bf_min - 1e-9);
            assert!((r.objective - a.rayleigh_quotient(r.x.values()).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn top_diagonal_examples() {
        let a = SymmetricMatrix::diag(&[1.0, 5.0, 3.0]).unwrap();
        let s = init_top_diagonal(&a, 2, DiagonalInit::Single).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 0.0]);
        let ind = init_top_diagonal(&a, 2, DiagonalInit::Indicator).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(ind.support().as_slice(), &[1, 2]);
        assert!((ind.values()[1] - h).abs() < 1e-15 && (ind.values()[2] - h).abs() < 1e-15);
    }

    #[test]
    fn top_diagonal_is_one_over_k_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let p = rng.gen_range(3..=10);
            let k = rng.gen_range(1..=p);
            let a = random_psd(p, &mut rng);
            let (opt, _) = brute_force_sparse_eig(&a, k).unwrap();
            let x0 = init_top_diagonal(&a, k, DiagonalInit::Single).unwrap();
            assert!(a.rayleigh_quotient(x0.values()).unwrap() >= opt / k as f64 - 1e-12);
        }
    }

    #[test]
    fn schedule_shapes() {
        assert_eq!(warm_start_schedule(10, 40, 0.5), vec![40, 20]);
        assert_eq!(warm_start_schedule(3, 3, 0.5), Vec::<usize>::new());
        assert_eq!(warm_start_schedule(2, 5, 0.9), vec![5, 4, 3]);
    }

    #[test]
    fn warm_start_with_k0_equal_k_is_plain_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_psd(8, &mut rng);
        let w = init_warm_start_schedule(&a, 3, 3, 0.5).unwrap();
        let plain = init_top_diagonal(&a, 3, DiagonalInit::Single).unwrap();
        assert_eq!(w, plain);
    }

    #[test]
    fn warm_start_finds_planted_support() {
        // Dense block on {4,..,7} with a strong gap; diagonal noise elsewhere.
        let p = 24;
        let planted = [4usize, 5, 6, 7];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = SymmetricMatrix::from_fn(p, |i, j| {
            let inside = planted.contains(&i) && planted.contains(&j);
            let base = if i == j { 1.0 + 0.5 * rng.gen::<f64>() } else { 0.05 * rng.gen_range(-1.0..1.0) };
            base + if inside { 2.0 } else { 0.0 }
        })
        .unwrap();
        let x0 = init_warm_start_schedule(&a, 4, 16, 0.5).unwrap();
        assert_eq!(x0.support().as_slice(), &planted);
    }

    #[test]
    fn backward_elimination_examples() {
        let d = SymmetricMatrix::diag(&[3.0, 2.0, 1.0]).unwrap();
        let x = init_backward_elimination(&d, 2).unwrap();
        assert_eq!(x.support().as_slice(), &[0, 1]);
        assert!((d.rayleigh_quotient(x.values()).unwrap() - 3.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_psd(8, &mut rng);
            let lmax = crate::linalg::symmetric_eigen(&a).values[0];
            let x = init_backward_elimination(&a, 3).unwrap();
            assert!(a.rayleigh_quotient(x.values()).unwrap() >= 3.0 / 8.0 * lmax - 1e-9);
            let full = init_backward_elimination(&a, 8).unwrap();
            assert!((a.rayleigh_quotient(full.values()).unwrap() - lmax).abs() < 1e-9);
        }
    }

    #[test]
    fn objective_matches_rayleigh_and_never_beats_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let p = rng.gen_range(4..=12);
            let k = rng.gen_range(1..=p);
            let a = if rng.gen_bool(0.5) { random_psd(p, &mut rng) } else { random_symmetric(p, &mut rng) };
            let (opt, _) = brute_force_sparse_eig(&a, k).unwrap();
            for init in [
                InitStrategy::TopDiagonalSingle,
                InitStrategy::TopDiagonalIndicator,
                InitStrategy::WarmStart { k0: None, factor: 0.5 },
                InitStrategy::BackwardElimination,
            ] {
                let r = tpower(&a, &SolveConfig::new(k).with_init(init)).unwrap();
                assert!(r.objective <= opt + 1e-9);
                assert!((r.objective - a.rayleigh_quotient(r.x.values()).unwrap()).abs() <= 1e-9);
                assert!(r.x.nnz() <= k);
            }
        }
    }

    #[test]
    fn shift_only_changes_reporting_not_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_psd(9, &mut rng);
        let c = 2.5;
        let shifted = a.affine(1.0, c);
        let cfg = SolveConfig::new(3).with_shift(ShiftPolicy::None);
        let r = tpower(&shifted, &cfg).unwrap();
        let q_a = a.rayleigh_quotient(r.x.values()).unwrap();
        assert!((r.objective - (q_a + c)).abs() < 1e-9);
        let r_fixed = tpower(&a, &SolveConfig::new(3).with_shift(ShiftPolicy::Fixed(c))).unwrap();
        assert_eq!(r_fixed.objective, a.rayleigh_quotient(r_fixed.x.values()).unwrap());
        assert_eq!(r_fixed.shift_used, c);
    }

    #[test]
    fn same_config_gives_identical_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_symmetric(15, &mut rng);
        let cfg = SolveConfig::new(4).with_seed(99).with_tol(0.0).with_max_iter(50);
        let r1 = tpower(&a, &cfg).unwrap();
        let r2 = tpower(&a, &cfg).unwrap();
        assert_eq!(r1, r2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn psd_iterates_ascend_and_stay_sparse(seed in any::<u64>(), p in 3usize..20, kf in 0.0f64..1.0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_psd(p, &mut rng);
                let k = 1 + ((p - 1) as f64 * kf) as usize;
                let cfg = SolveConfig::new(k).with_shift(ShiftPolicy::None).with_tol(0.0).with_max_iter(60);
                let r = tpower(&a, &cfg).unwrap();
                for w in r.trace.windows(2) {
                    prop_assert!(w[1].objective >= w[0].objective - 1e-10 * w[0].objective.abs().max(1.0));
                }
                for e in &r.trace {
                    prop_assert!(e.support.len() <= k);
                }
                prop_assert!((crate::linalg::norm2(r.x.values()) - 1.0).abs() < 1e-9);
            }
        }
    }
}
