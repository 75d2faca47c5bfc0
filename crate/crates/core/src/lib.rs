//! Exact characters of cyclic orbifolds of lattice vertex operator algebras.
//!
//! The crate is organised bottom-up: [`qseries`] provides exact series
//! arithmetic, [`modular`] eta quotients and their SL(2,Z) images,
//! [`lattice`] theta series and sublattices, [`autlift`] the analysis of a
//! lattice automorphism and its lift, and [`orbifold`] assembles the final
//! character.

pub mod qseries;
pub mod linalg;
pub mod modular;
pub mod lattice;
pub mod autlift;
pub mod orbifold;
