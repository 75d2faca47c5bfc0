//! Integral positive-definite lattices: Gram data, sublattices, short-vector
//! enumeration, theta series (plain, shifted and phase-twisted) and a small
//! on-disk cache for enumeration results.

mod cache;
mod enumerate;
mod extremal;
mod fixtures;
mod gram;
mod numeric;
mod sublattice;
mod theta;

pub use cache::{cache_dir_from_env, CacheEntry, ThetaCache};
pub use enumerate::{default_jobs, enumerate_by_norm, for_each_vector, lll_reduce, set_default_jobs, NormCounts, PhasedCounts};
pub use extremal::{eisenstein_e4, extremal_theta};
pub use fixtures::{a1, a2, d4, e8, golay_code, leech, scaled_a1, zn_scaled};
pub use gram::{parse_gram, parse_integer_matrix, parse_matrix, write_gram, write_matrix, GramLattice};
pub use numeric::{eval_numeric, theta_numeric, NumericValue};
pub use sublattice::{fixed_sublattice, kernel_of_character, PhaseCharacter, ShiftedCoset, Sublattice};
pub use theta::{is_cached, level_of, min_norm_coset, theta, theta_counts, theta_rational, ThetaRequest};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("gram matrix is not square or has inconsistent rows")]
    BadShape,
    #[error("gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("lattice is not even")]
    NotEven,
    #[error("matrix is not an isometry of the lattice")]
    NotAnIsometry,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("tail bound does not converge at this point (Im τ too small)")]
    DivergentTail,
    #[error("shift and phase cannot be combined")]
    ShiftWithPhase,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("extremal theta needs 24 | d, got {0}")]
    BadExtremalDimension(usize),
    #[error("cache I/O error: {0}")]
    Cache(String),
}
