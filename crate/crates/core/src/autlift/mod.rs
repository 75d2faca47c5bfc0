//! Lattice automorphisms and their lifts to the lattice VOA: cycle types of
//! powers, order doubling, the phases w_k on fixed-point sublattices,
//! twisted-sector conformal weights and orbifold types.

mod abstract_lift;
mod automorphism;
mod lift;
mod search;

pub use abstract_lift::AbstractLift;
pub use automorphism::{cycle_type_of, mat_mul, mat_pow, mat_vec, LatticeAutomorphism, Projection};
pub use lift::{
    conformal_weight, lift_order, orbifold_type, power_profile, w_on_fixed, w_value, LiftCase, LiftSpec, PowerEntry,
    PowerProfile,
};
pub use search::{suggest_type0_beta, suggest_type0_beta_with, DEFAULT_MULTIPLIERS};

use crate::lattice::LatticeError;
use crate::qseries::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AutError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("automorphism matrix has no finite order below {0}")]
    NotFiniteOrder(u64),
    #[error("N²ρ = {value} is not an integer (ρ = {rho}, N = {order})")]
    NonIntegralType { rho: Rational, order: u64, value: Rational },
    #[error("no type-0 lift found among {tried} candidates")]
    SearchExhausted { tried: usize },
    #[error("fixed-point sublattice has rank 0; only the standard lift exists")]
    RankZeroFixed,
    #[error("vector {alpha:?} is not fixed by ν^{k}")]
    NotFixed { k: u64, alpha: Vec<i64> },
    #[error("abstract lift data is insufficient: {0}")]
    Undetermined(String),
}
