//! Eta quotients, their SL(2,Z) transformation theory, Γ0(m) cosets and
//! fitting of q-expansions into eta-quotient bases.

mod cycle;
mod eta;
mod forms;
mod ligozat;
mod matrix;

pub use cycle::{CycleParseError, CycleType};
pub use eta::{
    dedekind_sum, eta_expand, eta_multiplier, eta_multiplier_phase, euler_power, expand_transformed,
    transform_eta_quotient, TransformedEtaFactor, TransformedEtaProduct,
};
pub use forms::{
    basis_for_space, basis_table, dimension_trivial, fit_in_basis, parse_basis_table, sturm_bound, BasisReport,
    FormSpace,
};
pub use ligozat::{cusp_order, ligozat_validate, LigozatReport, QuadraticCharacter};
pub use matrix::{coprime_lift, coset_reps_gamma0, UnimodularMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModularError {
    #[error("gcd({d}, {c}) != 1")]
    NonCoprime { d: i64, c: i64 },
    #[error("cycle length {t} does not divide the level {level}")]
    BadDivisor { t: u64, level: u64 },
    #[error("eta quotient {quotient} is not holomorphic at infinity")]
    NotHolomorphicAtInfinity { quotient: String },
    #[error("no eta-quotient basis at level {level}: found {found}, expected {expected:?}")]
    BasisNotFound { level: u64, found: usize, expected: Option<i64> },
    #[error("form is not in the space: {reason}")]
    NotInSpace { reason: String },
    #[error("series known to {have} coefficients, Sturm bound needs {need}")]
    InsufficientPrecision { have: u64, need: u64 },
    #[error("basis table line {line} is malformed")]
    TableParse { line: usize },
}
