use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::cache::ThetaCache;
use super::enumerate::{count_vectors, default_jobs, for_each_vector, PhasedCounts};
use super::gram::GramLattice;
use super::sublattice::{PhaseCharacter, ShiftedCoset};
use super::LatticeError;
use crate::qseries::rational::format_rational;
use crate::qseries::{CyclotomicNumber, CyclotomicSeries, Rational, RationalSeries};

/// Optional decorations of a theta series: a coset shift (in the lattice's
/// own coordinates) or a phase character, but not both.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThetaRequest<'a> {
    pub shift: Option<&'a [Rational]>,
    pub phase: Option<&'a PhaseCharacter>,
    pub cache: Option<&'a ThetaCache>,
}

fn preimage(l: &GramLattice, bound: &Rational, req: &ThetaRequest) -> String {
    let rows: Vec<String> = l.gram().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(" ")).collect();
    let shift = req.shift.map_or(String::from("-"), |s| s.iter().map(format_rational).collect::<Vec<_>>().join(" "));
    let phase = req.phase.filter(|p| !p.is_trivial()).map_or(String::from("-"), |p| {
        p.values().iter().map(format_rational).collect::<Vec<_>>().join(" ")
    });
    format!("gram={};shift={};phase={};bound={}", rows.join(","), shift, phase, format_rational(bound))
}

/// Vector counts of L (+ shift) with ⟨v,v⟩ < 2·trunc, keyed by norm and phase.
pub fn theta_counts(l: &GramLattice, trunc: &Rational, req: &ThetaRequest) -> Result<PhasedCounts, LatticeError> {
    if req.shift.is_some() && req.phase.is_some_and(|p| !p.is_trivial()) {
        return Err(LatticeError::ShiftWithPhase);
    }
    if let Some(s) = req.shift {
        if s.len() != l.dim() {
            return Err(LatticeError::DimensionMismatch { expected: l.dim(), got: s.len() });
        }
    }
    if let Some(p) = req.phase {
        if p.rank() != l.dim() {
            return Err(LatticeError::DimensionMismatch { expected: l.dim(), got: p.rank() });
        }
    }
    let bound = trunc * Rational::from_integer(2.into());
    let key = preimage(l, &bound, req);
    if let Some(c) = req.cache.and_then(|c| c.load(&key)) {
        return Ok(c);
    }
    let residues = req.phase.map(|p| p.residues());
    let phase = residues.as_ref().map(|(v, m)| (v.as_slice(), *m));
    let counts = count_vectors(l, &bound, true, req.shift, phase, default_jobs());
    if let Some(c) = req.cache {
        c.store(&key, &counts)?;
    }
    Ok(counts)
}

/// Whether `theta_counts` would be answered from the cache.
pub fn is_cached(l: &GramLattice, trunc: &Rational, req: &ThetaRequest) -> bool {
    let bound = trunc * Rational::from_integer(2.into());
    req.cache.is_some_and(|c| c.load(&preimage(l, &bound, req)).is_some())
}

/// Σ u(α) q^{⟨α+λ,α+λ⟩/2} up to O(q^trunc).
pub fn theta(l: &GramLattice, trunc: &Rational, req: &ThetaRequest) -> Result<CyclotomicSeries, LatticeError> {
    let counts = theta_counts(l, trunc, req)?;
    let m = counts.modulus;
    let mut acc: BTreeMap<Rational, CyclotomicNumber> = BTreeMap::new();
    let half = Rational::new(1.into(), 2.into());
    for ((n, p), c) in &counts.counts {
        let term = CyclotomicNumber::root_of_unity(m, *p as i64).scale(&Rational::from_integer((*c).into()));
        let e = n * &half;
        let slot = acc.entry(e).or_insert_with(CyclotomicNumber::zero);
        *slot = slot.add(&term);
    }
    Ok(CyclotomicSeries::from_terms(acc, Some(trunc.clone())))
}

/// Theta series with rational coefficients (phase of order ≤ 2, or none).
pub fn theta_rational(l: &GramLattice, trunc: &Rational, req: &ThetaRequest) -> Result<RationalSeries, LatticeError> {
    let s = theta(l, trunc, req)?;
    Ok(s.map_coeffs(|c| c.to_rational().expect("phase of order ≤ 2 gives rational coefficients")))
}

/// Least N with N·G⁻¹ integral with even diagonal.
pub fn level_of(l: &GramLattice) -> Result<u64, LatticeError> {
    if !l.is_even() {
        return Err(LatticeError::NotEven);
    }
    let dual = l.dual();
    let two = Rational::from_integer(2.into());
    let mut n = 1u64;
    for (i, row) in dual.gram().iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let v = if i == j { x / &two } else { x.clone() };
            n = n.lcm(&v.denom().to_u64().expect("denominator fits u64"));
        }
    }
    Ok(n)
}

/// min ⟨v,v⟩ over the coset L + λ.
pub fn min_norm_coset(c: &ShiftedCoset) -> Rational {
    if c.shift.iter().all(|x| x.is_zero()) || c.lattice.dim() == 0 {
        return Rational::zero();
    }
    // Babai rounding gives an upper bound; enumeration then finds the minimum.
    let v: Vec<Rational> = c.shift.iter().map(|x| x - x.round()).collect();
    let bound = c.lattice.inner(&v, &v);
    let mut best = bound.clone();
    for_each_vector(&c.lattice, &bound, Some(&c.shift), |_, n| {
        if *n < best {
            best = n.clone();
        }
    });
    best
}
