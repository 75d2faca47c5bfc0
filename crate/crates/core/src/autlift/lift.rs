use std::fmt;

use num_traits::Zero;

use super::automorphism::{cycle_type_of, mat_vec, LatticeAutomorphism};
use super::AutError;
use crate::lattice::{min_norm_coset, LatticeError, PhaseCharacter, ShiftedCoset, Sublattice};
use crate::linalg::{solve, transpose, Solution};
use crate::modular::CycleType;
use crate::qseries::rational::frac;
use crate::qseries::{int, rat, Rational};

/// How a lift relates to the standard lift of its isometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftCase {
    Standard,
    StandardDoubled,
    NonStandard,
}

impl fmt::Display for LiftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftCase::Standard => "standard lift without order doubling",
            LiftCase::StandardDoubled => "standard lift with order doubling",
            LiftCase::NonStandard => "non-standard lift",
        })
    }
}

/// ν̂ = (standard lift of ν) ∘ e^{2πi β(0)} with β in the fixed space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSpec {
    base: LatticeAutomorphism,
    beta: Vec<Rational>,
    doubling: bool,
    hat_order: u64,
}

impl LiftSpec {
    pub fn standard(base: LatticeAutomorphism) -> Self {
        let beta = vec![Rational::zero(); base.dim()];
        Self::build(base, beta)
    }

    /// `beta` in the coordinates of the lattice basis; it is replaced by its
    /// projection onto the fixed space of ν.
    pub fn new(base: LatticeAutomorphism, beta: Vec<Rational>) -> Result<Self, AutError> {
        if beta.len() != base.dim() {
            return Err(LatticeError::DimensionMismatch { expected: base.dim(), got: beta.len() }.into());
        }
        let beta = base.project(&beta);
        Ok(Self::build(base, beta))
    }

    fn build(base: LatticeAutomorphism, beta: Vec<Rational>) -> Self {
        let doubling = standard_doubles(&base);
        let hat_order = hat_order(&base, &beta, doubling);
        Self { base, beta, doubling, hat_order }
    }

    pub fn base(&self) -> &LatticeAutomorphism {
        &self.base
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn is_standard(&self) -> bool {
        self.beta.iter().all(Zero::is_zero)
    }

    /// Whether the standard lift of ν has order 2n.
    pub fn standard_doubles(&self) -> bool {
        self.doubling
    }

    pub fn hat_order(&self) -> u64 {
        self.hat_order
    }

    pub fn case(&self) -> LiftCase {
        match (self.is_standard(), self.doubling) {
            (false, _) => LiftCase::NonStandard,
            (true, false) => LiftCase::Standard,
            (true, true) => LiftCase::StandardDoubled,
        }
    }
}

fn unit(d: usize, i: usize) -> Vec<i64> {
    (0..d).map(|j| i64::from(i == j)).collect()
}

/// ⟨α, ν^{n/2}α⟩ odd for some basis vector α. Parity is additive because
/// the cross term 2⟨α, ν^{n/2}β⟩ is even, so a basis check suffices.
fn standard_doubles(a: &LatticeAutomorphism) -> bool {
    let n = a.order();
    if n % 2 == 1 {
        return false;
    }
    let half = a.power_matrix(n / 2);
    let d = a.dim();
    (0..d).any(|i| {
        let e = unit(d, i);
        let v = a.lattice().inner_i64(&e, &mat_vec(&half, &e));
        !(v / int(2)).is_integer()
    })
}

/// Least multiple N of n with ν̂^N = 1: on e^α the lift ν̂^{n·k} acts by
/// e(nk⟨β,α⟩)·(−1)^{k⟨α,ν^{n/2}α⟩}, both additive in α.
fn hat_order(a: &LatticeAutomorphism, beta: &[Rational], doubling: bool) -> u64 {
    let n = a.order();
    let d = a.dim();
    let half = doubling.then(|| a.power_matrix(n / 2));
    let per_basis: Vec<(Rational, Rational)> = (0..d)
        .map(|i| {
            let e = unit(d, i);
            let pairing = a.lattice().inner(beta, &e.iter().map(|&x| int(x)).collect::<Vec<_>>());
            let sign = half.as_ref().map_or(Rational::zero(), |h| a.lattice().inner_i64(&e, &mat_vec(h, &e)) / int(2));
            (pairing * int(n as i64), sign)
        })
        .collect();
    let mut k = 1u64;
    loop {
        let kr = int(k as i64);
        if per_basis.iter().all(|(p, s)| frac(&((p + s) * &kr)).is_zero()) {
            return n * k;
        }
        k += 1;
    }
}

/// w_k(α) for α ∈ L^{ν^k}, as an element of Q/Z.
pub fn w_value(spec: &LiftSpec, k: u64, alpha: &[i64]) -> Result<Rational, AutError> {
    let a = spec.base();
    if mat_vec(&a.power_matrix(k), alpha) != alpha {
        return Err(AutError::NotFixed { k, alpha: alpha.to_vec() });
    }
    let l = a.lattice();
    let n = a.order();
    // Σ_{i<k} ⟨β, ν^i α⟩ = k⟨β, α⟩ since β is ν-fixed.
    let alpha_q: Vec<Rational> = alpha.iter().map(|&x| int(x)).collect();
    let mut v = l.inner(spec.beta(), &alpha_q) * int(k as i64);
    if n % 2 == 0 && k % 2 == 0 {
        let image = mat_vec(&a.power_matrix(k / 2), alpha);
        v += l.inner_i64(alpha, &image) * rat(1, 2);
    }
    Ok(frac(&v))
}

/// L^{ν^k} with the character w_k on its basis.
pub fn w_on_fixed(spec: &LiftSpec, k: u64) -> (Sublattice, PhaseCharacter) {
    let fixed = spec.base().fixed(k);
    let values = fixed.basis().iter().map(|b| w_value(spec, k, b).expect("basis of the fixed lattice is fixed")).collect();
    (fixed, PhaseCharacter::new(values))
}

#[derive(Clone, Debug)]
pub struct PowerEntry {
    pub k: u64,
    pub cycle_type: CycleType,
    pub fixed: Sublattice,
    pub w: PhaseCharacter,
}

/// Data of ν̂^k for k = 0..N−1.
#[derive(Clone, Debug)]
pub struct PowerProfile {
    pub entries: Vec<PowerEntry>,
}

pub fn power_profile(spec: &LiftSpec) -> PowerProfile {
    let entries = (0..spec.hat_order())
        .map(|k| {
            let (fixed, w) = w_on_fixed(spec, k);
            PowerEntry { k, cycle_type: cycle_type_of(spec.base(), k), fixed, w }
        })
        .collect();
    PowerProfile { entries }
}

pub fn lift_order(spec: &LiftSpec) -> u64 {
    spec.hat_order()
}

/// c/24 − (1/24)Σ b_t/t, the conformal weight of the ground state of the twisted Fock space.
pub(crate) fn vacuum_weight(dim: usize, c: &CycleType) -> Rational {
    rat(dim as i64, 24) - c.inverse_moment() / int(24)
}

/// ρ = c/24 − (1/24)Σ b_t/t + (1/2)·min ⟨v,v⟩ over π_ν(L) + β.
pub fn conformal_weight(spec: &LiftSpec) -> Rational {
    let a = spec.base();
    let rho0 = vacuum_weight(a.dim(), &cycle_type_of(a, 1));
    if spec.is_standard() {
        return rho0;
    }
    let proj = a.projection();
    // Coordinates of β in the basis of π_ν(L).
    let Solution::Unique(z) = solve(&transpose(&proj.basis), spec.beta()) else {
        unreachable!("β lies in the fixed space, which π_ν(L) spans")
    };
    let coset = ShiftedCoset::new(proj.lattice.clone(), z).expect("dimensions agree");
    rho0 + min_norm_coset(&coset) / int(2)
}

/// N²ρ mod N.
pub fn orbifold_type(spec: &LiftSpec) -> Result<u64, AutError> {
    type_from(conformal_weight(spec), spec.hat_order())
}

pub(crate) fn type_from(rho: Rational, order: u64) -> Result<u64, AutError> {
    let n = int(order as i64);
    let value = &rho * &n * &n;
    if !value.is_integer() {
        return Err(AutError::NonIntegralType { rho, order, value });
    }
    let t = value.to_integer() % num_bigint::BigInt::from(order);
    let t: i64 = t.try_into().expect("residue fits");
    Ok(t.rem_euclid(order as i64) as u64)
}
