//! Symmetric matrix storage, vector primitives and small dense eigen-solvers.

pub mod eigen;
pub mod matrix;
pub mod operator;
pub mod vector;

pub use eigen::{
    dominant_eigenpair, dominant_eigenpair_from, jacobi_eigen, leading_eigenpair, orient, symmetric_eigen, SymmetricEigen,
};
pub use matrix::{StoragePolicy, SymmetricMatrix, DEFAULT_SYMMETRY_TOL};
pub use operator::{Affine, GramOperator, SymmetricOperator};
pub use vector::{dot, norm2, normalize, top_k_support, top_k_values, truncate, IndexSet, SparseUnitVector};
