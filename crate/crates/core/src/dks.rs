//! Densest k-subgraph: the truncated power method on 0/1 indicators with a
//! gradually increased diagonal shift, two greedy baselines, the relaxed
//! route through the sparse eigenvalue solver, and sequential extraction.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{top_k_values, IndexSet, StoragePolicy, SymmetricMatrix};
use crate::solver::{tpower, InitStrategy, ShiftPolicy, SolveConfig};

/// Edge list over vertices `0..n` with non-negative weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    directed: bool,
    self_loops_dropped: usize,
}

impl WeightedGraph {
    /// Self-loops are dropped (and counted); duplicate keys are rejected.
    /// For undirected graphs `(u, v)` and `(v, u)` are the same key.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(edges.len());
        let mut self_loops_dropped = 0;
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            if u == v {
                self_loops_dropped += 1;
                continue;
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
            kept.push((u, v, w));
        }
        Ok(WeightedGraph {
            n,
            edges: kept,
            directed,
            self_loops_dropped,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    /// Symmetric affinity matrix: `W` for undirected graphs, `(W + W^T)/2`
    /// for directed ones. Zero diagonal.
    pub fn to_matrix(&self) -> SymmetricMatrix {
        let mut map = BTreeMap::new();
        let half = if self.directed { 0.5 } else { 1.0 };
        for &(u, v, w) in &self.edges {
            *map.entry((u, v)).or_insert(0.0) += half * w;
            *map.entry((v, u)).or_insert(0.0) += half * w;
        }
        SymmetricMatrix::from_symmetric_map(self.n, map, StoragePolicy::Auto)
    }
}

/// `(W + W^T) / 2` of a row-major square non-negative matrix.
pub fn symmetrize(n: usize, w: &[f64]) -> Result<SymmetricMatrix> {
    if n == 0 || w.len() != n * n {
        return Err(Error::invalid(format!("expected {n} x {n} entries, got {}", w.len())));
    }
    if let Some(i) = w.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "weight {} at ({}, {}) is not a finite non-negative number",
            w[i],
            i / n,
            i % n
        )));
    }
    SymmetricMatrix::from_fn(n, |i, j| 0.5 * (w[i * n + j] + w[j * n + i]))
}

/// 0/1 vector with exactly `cardinality` ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorVector {
    n: usize,
    support: IndexSet,
}

impl IndicatorVector {
    pub fn new(n: usize, support: IndexSet) -> Result<Self> {
        support.check_bound(n)?;
        if support.is_empty() {
            return Err(Error::invalid("indicator vector needs at least one vertex"));
        }
        Ok(IndicatorVector { n, support })
    }

    pub fn cardinality(&self) -> usize {
        self.support.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn bits(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        for i in self.support.iter() {
            b[i] = 1.0;
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DksMethod {
    Tpower,
    Feige,
    Ravi,
    /// Algorithm 1 on `W` with `||pi|| = sqrt(k)`, rounded to its support.
    Relaxed,
}

impl std::str::FromStr for DksMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tpower" => Ok(DksMethod::Tpower),
            "feige" => Ok(DksMethod::Feige),
            "ravi" => Ok(DksMethod::Ravi),
            "relaxed" => Ok(DksMethod::Relaxed),
            other => Err(Error::invalid(format!("unknown DkS method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DksTraceEntry {
    pub objective: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DksResult {
    pub method: DksMethod,
    pub vertices: IndexSet,
    /// `pi^T W pi / k`.
    pub density: f64,
    pub iterations: usize,
    pub final_shift: f64,
    /// Accepted iterates only; entry 0 is the start.
    pub trace: Vec<DksTraceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DksConfig {
    pub max_iter: usize,
    /// Stop once an accepted step raises `pi^T W pi` by at most this much.
    pub tol: f64,
}

impl Default for DksConfig {
    fn default() -> Self {
        DksConfig { max_iter: 1000, tol: 0.0 }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cardinality k = {k} outside [1, {n}]")));
    }
    Ok(())
}

fn check_weights(w: &SymmetricMatrix) -> Result<()> {
    for i in 0..w.dim() {
        let mut bad = None;
        w.for_each_in_row(i, |j, v| {
            if i != j && v < 0.0 && bad.is_none() {
                bad = Some((j, v));
            }
        });
        if let Some((j, v)) = bad {
            return Err(Error::invalid(format!("negative weight {v} at ({i}, {j})")));
        }
    }
    Ok(())
}

/// `pi_S^T W pi_S`.
fn quad(w: &SymmetricMatrix, s: &IndexSet) -> f64 {
    let mut total = 0.0;
    for i in s.iter() {
        w.for_each_in_row(i, |j, v| {
            if s.contains(j) {
                total += v;
            }
        });
    }
    total
}

/// `pi_S^T W pi_S / |S|`.
pub fn density(w: &SymmetricMatrix, s: &IndexSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::invalid("density of an empty vertex set"));
    }
    s.check_bound(w.dim())?;
    Ok(quad(w, s) / s.len() as f64)
}

fn weighted_degrees(w: &SymmetricMatrix) -> Vec<f64> {
    (0..w.dim())
        .map(|i| {
            let mut d = 0.0;
            w.for_each_in_row(i, |_, v| d += v);
            d
        })
        .collect()
}

/// Indicator of the `k` largest weighted degrees (lowest index wins ties).
pub fn init_top_degree(w: &SymmetricMatrix, k: usize) -> Result<IndicatorVector> {
    check_k(w.dim(), k)?;
    IndicatorVector::new(w.dim(), top_k_values(&weighted_degrees(w), k)?)
}

fn product(w: &SymmetricMatrix, s: &IndexSet, shift: f64) -> Vec<f64> {
    let mut y = vec![0.0; w.dim()];
    for j in s.iter() {
        // Symmetric, so column j equals row j.
        w.for_each_in_row(j, |i, v| y[i] += v);
        y[j] += shift;
    }
    y
}

/// TPower-DkS from `pi0`. A step that lowers `pi^T W pi` is repeated on
/// `W + lambda I` with `lambda <- min(max(2 lambda, 0.1 g), g)`, `g` the
/// Gershgorin shift bound, until it no longer does.
pub fn tpower_dks(w: &SymmetricMatrix, k: usize, pi0: &IndicatorVector, config: &DksConfig) -> Result<DksResult> {
    let n = w.dim();
    check_k(n, k)?;
    check_weights(w)?;
    if pi0.dim() != n || pi0.cardinality() != k {
        return Err(Error::invalid(format!(
            "start has {} of {} vertices, expected {k} of {n}",
            pi0.cardinality(),
            pi0.dim()
        )));
    }
    if config.max_iter == 0 || !(config.tol >= 0.0) {
        return Err(Error::invalid("max_iter must be positive and tol non-negative"));
    }
    let g = w.gershgorin_shift_bound();
    let mut shift = 0.0f64;
    let mut current = pi0.support().clone();
    let mut obj = quad(w, &current);
    let mut trace = vec![DksTraceEntry { objective: obj, shift }];
    let mut iterations = 0;
    // Slack for comparing sums of the same weights in a different order.
    let eps = 1e-12 * (1.0 + w.max_abs() * k as f64);
    for _ in 0..config.max_iter {
        let (next, next_obj) = loop {
            let cand = top_k_values(&product(w, &current, shift), k)?;
            let cand_obj = quad(w, &cand);
            if cand_obj >= obj - eps || shift >= g {
                break (cand, cand_obj);
            }
            shift = (2.0 * shift).max(0.1 * g).min(g);
            log::debug!("DkS step lowered the objective; shift raised to {shift}");
        };
        if next_obj < obj - eps {
            // Only reachable through rounding at the PSD shift; keep the last accepted set.
            break;
        }
        iterations += 1;
        let gain = next_obj - obj;
        let repeated = next == current;
        current = next;
        obj = next_obj;
        trace.push(DksTraceEntry { objective: obj, shift });
        if repeated || gain <= config.tol {
            break;
        }
    }
    Ok(DksResult {
        method: DksMethod::Tpower,
        density: obj / k as f64,
        vertices: current,
        iterations,
        final_shift: shift,
        trace,
    })
}

fn fixed_result(w: &SymmetricMatrix, method: DksMethod, vertices: IndexSet) -> DksResult {
    let obj = quad(w, &vertices);
    DksResult {
        method,
        density: obj / vertices.len() as f64,
        vertices,
        iterations: 0,
        final_shift: 0.0,
        trace: vec![DksTraceEntry { objective: obj, shift: 0.0 }],
    }
}

/// Greedy of Feige et al.: the `ceil(k/2)` highest-degree vertices, plus the
/// `floor(k/2)` others with the most weight into that set.
pub fn greedy_feige(w: &SymmetricMatrix, k: usize) -> Result<DksResult> {
    let n = w.dim();
    check_k(n, k)?;
    check_weights(w)?;
    let head = top_k_values(&weighted_degrees(w), k.div_ceil(2))?;
    let tail_k = k / 2;
    let mut chosen = head.clone().into_vec();
    if tail_k > 0 {
        let mut into_head = vec![0.0; n];
        for s in head.iter() {
            w.for_each_in_row(s, |i, v| into_head[i] += v);
        }
        let rest: Vec<usize> = (0..n).filter(|i| !head.contains(*i)).collect();
        let scores: Vec<f64> = rest.iter().map(|&i| into_head[i]).collect();
        chosen.extend(top_k_values(&scores, tail_k)?.iter().map(|a| rest[a]));
    }
    Ok(fixed_result(w, DksMethod::Feige, IndexSet::new(chosen)))
}

/// Greedy of Ravi et al.: start from a heaviest edge and repeatedly add the
/// vertex with the most weight into the current set.
pub fn greedy_ravi(w: &SymmetricMatrix, k: usize) -> Result<DksResult> {
    let n = w.dim();
    check_k(n, k)?;
    if k < 2 {
        return Err(Error::invalid("greedy_ravi needs k >= 2"));
    }
    check_weights(w)?;
    let mut heaviest: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        w.for_each_in_row(i, |j, v| {
            if j > i && v > 0.0 && heaviest.map_or(true, |(b, bi, bj)| v > b || (v == b && (i, j) < (bi, bj))) {
                heaviest = Some((v, i, j));
            }
        });
    }
    let (_, a, b) = heaviest.ok_or(Error::NoEdges)?;
    let mut inside = vec![false; n];
    let mut gain = vec![0.0; n];
    let mut chosen = Vec::with_capacity(k);
    for v in [a, b] {
        inside[v] = true;
        chosen.push(v);
        w.for_each_in_row(v, |i, x| gain[i] += x);
    }
    while chosen.len() < k {
        let mut best: Option<usize> = None;
        for i in 0..n {
            if !inside[i] && best.map_or(true, |b| gain[i] > gain[b]) {
                best = Some(i);
            }
        }
        let v = best.expect("k <= n leaves a candidate");
        inside[v] = true;
        chosen.push(v);
        w.for_each_in_row(v, |i, x| gain[i] += x);
    }
    Ok(fixed_result(w, DksMethod::Ravi, IndexSet::new(chosen)))
}

/// The relaxation route: Algorithm 1 on `W` started from the normalized
/// top-degree indicator, rounded to the support of its output.
pub fn relaxed_dks(w: &SymmetricMatrix, k: usize, config: &DksConfig) -> Result<DksResult> {
    check_k(w.dim(), k)?;
    check_weights(w)?;
    let start = init_top_degree(w, k)?.bits();
    let cfg = SolveConfig::new(k)
        .with_shift(ShiftPolicy::Auto)
        .with_max_iter(config.max_iter)
        .with_init(InitStrategy::Custom(start));
    let r = tpower(w, &cfg)?;
    let mut res = fixed_result(w, DksMethod::Relaxed, r.x.support().clone());
    res.iterations = r.iterations;
    res.final_shift = r.shift_used;
    Ok(res)
}

/// One solve with the given method; TPower-DkS starts from the top-degree
/// indicator.
pub fn solve_dks(w: &SymmetricMatrix, k: usize, method: DksMethod, config: &DksConfig) -> Result<DksResult> {
    match method {
        DksMethod::Tpower => tpower_dks(w, k, &init_top_degree(w, k)?, config),
        DksMethod::Feige => greedy_feige(w, k),
        DksMethod::Ravi => greedy_ravi(w, k),
        DksMethod::Relaxed => relaxed_dks(w, k, config),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialDks {
    /// Vertex sets are in the original numbering.
    pub rounds: Vec<DksResult>,
    pub total_density: f64,
    /// Set when the remaining graph ran out of edges before `m` rounds.
    pub truncated: bool,
}

fn has_edges(w: &SymmetricMatrix) -> bool {
    let mut found = false;
    for i in 0..w.dim() {
        w.for_each_in_row(i, |j, v| found |= j != i && v > 0.0);
        if found {
            break;
        }
    }
    found
}

/// `m` rounds of: solve, then delete the chosen vertices and their edges.
pub fn sequential_dks(
    w: &SymmetricMatrix,
    k: usize,
    m: usize,
    method: DksMethod,
    config: &DksConfig,
) -> Result<SequentialDks> {
    let n = w.dim();
    check_k(n, k)?;
    if m == 0 || m.checked_mul(k).map_or(true, |mk| mk > n) {
        return Err(Error::invalid(format!("m * k = {m} * {k} exceeds {n} vertices")));
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut rounds = Vec::with_capacity(m);
    let mut truncated = false;
    for _ in 0..m {
        let sub = w.principal_submatrix(&IndexSet::new(alive.clone()))?;
        if !has_edges(&sub) {
            truncated = true;
            break;
        }
        let mut r = solve_dks(&sub, k, method, config)?;
        let picked: Vec<usize> = r.vertices.iter().map(|i| alive[i]).collect();
        r.vertices = IndexSet::new(picked.clone());
        alive.retain(|v| !picked.contains(v));
        rounds.push(r);
    }
    Ok(SequentialDks {
        total_density: rounds.iter().map(|r| r.density).sum(),
        rounds,
        truncated,
    })
}
