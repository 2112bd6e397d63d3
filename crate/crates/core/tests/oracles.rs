//! Solver outputs against exhaustive enumeration written independently of
//! the library's own oracles.

use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpower::dks::symmetrize;
use tpower::io::{load_matrix_market, write_matrix_market};
use tpower::linalg::{StoragePolicy, SymmetricMatrix};
use tpower::solver::{tpower, InitStrategy, ShiftPolicy, SolveConfig};
use tpower::theory::{brute_force_dks, brute_force_sparse_eig};

/// Largest eigenvalue of a small dense block via nalgebra.
fn block_lambda_max(a: &SymmetricMatrix, s: &[usize]) -> f64 {
    let m = nalgebra::DMatrix::from_fn(s.len(), s.len(), |i, j| a.entry(s[i], s[j]));
    m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn random_symmetric(rng: &mut ChaCha8Rng, p: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(p, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
}

#[test]
fn dks_oracle_matches_edge_counting() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 12;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < 0.4 {
                    edges.push((i, j));
                }
            }
        }
        let mut dense = vec![0.0; n * n];
        for &(i, j) in &edges {
            dense[i * n + j] = 1.0;
        }
        let w = symmetrize(n, &dense).unwrap().affine(2.0, 0.0);
        let best_edges = (0..n)
            .combinations(4)
            .map(|s| edges.iter().filter(|(u, v)| s.contains(u) && s.contains(v)).count())
            .max()
            .unwrap();
        let (d, set) = brute_force_dks(&w, 4).unwrap();
        assert_eq!(d, 2.0 * best_edges as f64 / 4.0);
        assert_eq!(set.len(), 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_agrees_with_nalgebra_and_bounds_every_config(seed in 0u64..100_000, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 8;
        let a = random_symmetric(&mut rng, p);
        let direct = (0..p).combinations(k).map(|s| block_lambda_max(&a, &s)).fold(f64::NEG_INFINITY, f64::max);
        let (opt, _) = brute_force_sparse_eig(&a, k).unwrap();
        prop_assert!((opt - direct).abs() < 1e-9);
        let inits = [
            InitStrategy::TopDiagonalSingle,
            InitStrategy::TopDiagonalIndicator,
            InitStrategy::WarmStart { k0: None, factor: 0.5 },
            InitStrategy::BackwardElimination,
        ];
        for init in inits {
            for shift in [ShiftPolicy::None, ShiftPolicy::Auto] {
                let cfg = SolveConfig::new(k).with_init(init.clone()).with_shift(shift);
                match tpower(&a, &cfg) {
                    Ok(r) => prop_assert!(r.objective <= opt + 1e-9),
                    Err(tpower::Error::DegenerateIterate { .. }) | Err(tpower::Error::ConvergenceFailure { .. }) => {}
                    Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
                }
            }
        }
    }

    #[test]
    fn matrix_market_round_trip(seed in 0u64..100_000, p in 1usize..12, sparse in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SymmetricMatrix::from_fn(p, |_, _| {
            if rng.gen::<f64>() < 0.5 { 0.0 } else { rng.gen_range(-1e3..1e3) * 10f64.powi(rng.gen_range(-20..20)) }
        })
        .unwrap()
        .with_storage(if sparse { StoragePolicy::Sparse } else { StoragePolicy::Dense });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mtx");
        write_matrix_market(&a, &path).unwrap();
        let b = load_matrix_market(&path).unwrap();
        prop_assert_eq!(a.to_dense_vec(), b.to_dense_vec());
    }
}
