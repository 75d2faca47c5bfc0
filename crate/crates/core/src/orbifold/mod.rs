//! Characters of cyclic orbifolds V_L^{⟨ν̂⟩}: untwisted traces, the partial
//! sums D_t and their SL(2,Z)-symmetrisations C_t, and the assembled
//! orbifold character.

mod character;
mod input;
mod traces;

pub use character::{extract_dims, module_characters, orbifold_character, zm_character, OrbifoldReport};
pub use input::{OrbifoldInput, Sector};
pub use traces::{
    compute_ct, compute_ct_with_reps, compute_dt, twisted_trace, untwisted_trace, Orbifold, Provenance, TraceFunction,
};

use crate::autlift::AutError;
use crate::lattice::LatticeError;
use crate::modular::ModularError;
use crate::qseries::SeriesError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbifoldError {
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("orbifold has type {ty} (order {order}); only type 0 is supported")]
    NotType0 { ty: u64, order: u64 },
    #[error("the two forms of D_{t} disagree")]
    MismatchedForms { t: u64 },
    #[error("C_{t} has a non-rational coefficient: {detail}")]
    NonRational { t: u64, detail: String },
    #[error("central charge {0} is not supported (need 24 | c)")]
    BadCentralCharge(usize),
    #[error("theta series of a rank-{rank} lattice to norm {bound} needs about {estimate:.2e} vectors; provide a populated cache")]
    NeedsCache { rank: usize, bound: String, estimate: f64 },
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("character check failed: {0}")]
    Integrality(String),
}
